#pragma once

#include <string>

#include "faceprobe/dataset.hpp"

namespace fp {

// Parametric face renderer used for desk-scale experiments. Cues:
// gender <-> head aspect ratio, age <-> wrinkle stripe frequency,
// expression <-> mouth curvature/openness, ethnicity <-> skin intensity band
// (feature contrast scales with the band). A cue strength of 0 removes the
// class signal entirely.
struct CorpusSpec {
  int train_count = 400;
  int test_count = 200;
  int canvas_rows = 96;
  int canvas_cols = 88;
  double gender_cue = 1.0;
  double age_cue = 1.0;
  double expression_cue = 1.0;
  double ethnicity_cue = 1.0;
  // 0: wrinkle frequency maps to age the same way for both genders;
  // 1: the mapping is reversed for female faces.
  int age_gender_coupling = 0;
  double noise = 5.0;
  int age_bins = 6;
  std::vector<std::string> genders = {"male", "female"};
  std::vector<std::string> expressions = {"anger", "disgust", "fear", "happy", "sad", "surprise"};
  std::vector<std::string> ethnicities = {"white", "black", "indian", "other"};
};

CorpusSpec default_corpus_spec();

// "key: value" lines; '#' comments; list values comma-separated.
CorpusSpec parse_corpus_spec(const std::string& path);
void write_corpus_spec(const CorpusSpec& spec, const std::string& path);

struct SynthResult {
  std::string train_manifest;
  std::string test_manifest;
};

// Writes images/, landmarks/, train.csv, test.csv and spec.txt under out_dir.
// Identical (spec, seed) pairs produce byte-identical trees.
SynthResult generate_synthetic_corpus(const CorpusSpec& spec, uint64_t seed,
                                      const std::string& out_dir);

}  // namespace fp
