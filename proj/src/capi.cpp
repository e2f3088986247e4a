#include "faceprobe.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>

#include "faceprobe/image_io.hpp"
#include "faceprobe/pipeline.hpp"
#include "faceprobe/synth.hpp"

using namespace fp;

struct fp_bundle {
  ModelBundle bundle;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_err(char** err, const std::string& msg) {
  if (err) *err = dup_string(msg);
}

template <typename Fn>
fp_status guarded(char** err, Fn&& fn) {
  try {
    fn();
    return FP_OK;
  } catch (const Error& e) {
    set_err(err, e.what());
    switch (e.kind()) {
      case ErrorKind::Usage: return FP_ERR_USAGE;
      case ErrorKind::Data: return FP_ERR_DATA;
      case ErrorKind::Numeric: return FP_ERR_NUMERIC;
    }
    return FP_ERR_NUMERIC;
  } catch (const std::exception& e) {
    set_err(err, e.what());
    return FP_ERR_NUMERIC;
  }
}

void require_arg(const void* p, const char* name) {
  if (!p) raise_usage(std::string("missing required argument: ") + name);
}

TrainOptions resolve_options(const fp_train_options* opt) {
  TrainOptions out;
  out.mlp.n_hidden = 64;
  out.mlp.n_iterations = 1000;
  out.mlp.learning_rate = 0.01;
  out.mlp.goal_mse = 1e-4;
  if (!opt) return out;
  if (opt->preset) apply_preset(out, opt->preset);
  if (opt->hidden > 0) out.mlp.n_hidden = opt->hidden;
  if (opt->iterations > 0) out.mlp.n_iterations = int(opt->iterations);
  if (opt->learning_rate > 0.0) out.mlp.learning_rate = opt->learning_rate;
  if (opt->goal_mse > 0.0) out.mlp.goal_mse = opt->goal_mse;
  out.mlp.seed = opt->seed;
  if (opt->pca >= 1.0)
    out.pca_retention = PcaRetention::by_count(int(opt->pca));
  else if (opt->pca > 0.0)
    out.pca_retention = PcaRetention::by_fraction(opt->pca);
  if (opt->texture_size > 0) out.extractor.texture_size = opt->texture_size;
  if (opt->grid_step > 0) out.extractor.grid_step = opt->grid_step;
  if (opt->variance_keep > 0.0) out.extractor.variance_keep = opt->variance_keep;
  return out;
}

// Cascade evaluation needs the three heads together.
EvalResult evaluate_token(const ModelBundle& bundle, const std::string& token,
                          const std::vector<DatasetRecord>& records) {
  if (token == "age-cascade")
    return evaluate_cascade(records, require_head(bundle, "gender"),
                            require_head(bundle, "age_male"), require_head(bundle, "age_female"));
  return evaluate(records, require_head(bundle, token));
}

}  // namespace

extern "C" {

const char* fp_version(void) { return "1.0.0"; }

void fp_free(char* ptr) { std::free(ptr); }

fp_status fp_synth(const char* spec_path, const char* out_dir, uint64_t seed, char** err) {
  return guarded(err, [&] {
    require_arg(out_dir, "out_dir");
    CorpusSpec spec = spec_path ? parse_corpus_spec(spec_path) : default_corpus_spec();
    generate_synthetic_corpus(spec, seed, out_dir);
  });
}

fp_status fp_train(const char* manifest_path, const char* task, const char* extractor,
                   const fp_train_options* options, const char* out_bundle, char** err) {
  return guarded(err, [&] {
    require_arg(manifest_path, "manifest");
    require_arg(task, "task");
    require_arg(extractor, "extractor");
    require_arg(out_bundle, "out");
    ExtractorKind kind = parse_extractor_token(extractor);
    TrainOptions opts = resolve_options(options);
    std::vector<DatasetRecord> records = load_manifest(manifest_path);

    ModelBundle bundle;
    if (std::filesystem::exists(out_bundle)) bundle = load_bundle(out_bundle);

    std::string token(task);
    if (token == "age-cascade") {
      CascadeModels cascade = train_age_cascade(records, kind, opts, opts);
      bundle.heads.insert_or_assign("gender", std::move(cascade.gender));
      bundle.heads.insert_or_assign("age_male", std::move(cascade.age_male));
      bundle.heads.insert_or_assign("age_female", std::move(cascade.age_female));
    } else {
      Task t = parse_task_token(token);
      if (t == Task::AgeMale || t == Task::AgeFemale)
        raise_usage("train the gendered age heads via the 'age-cascade' task");
      TaskModel head = train_task(records, t, kind, opts);
      bundle.heads.insert_or_assign(task_token(t), std::move(head));
    }
    save_bundle(bundle, out_bundle);
  });
}

fp_status fp_bundle_open(const char* path, fp_bundle** out, char** err) {
  return guarded(err, [&] {
    require_arg(path, "path");
    require_arg(out, "out");
    auto handle = std::make_unique<fp_bundle>();
    handle->bundle = load_bundle(path);
    *out = handle.release();
  });
}

void fp_bundle_close(fp_bundle* bundle) { delete bundle; }

fp_status fp_predict(const fp_bundle* bundle, const char* image_path, const double* eyes4,
                     const char* landmarks_path, int as_json, char** report, char** err) {
  return guarded(err, [&] {
    require_arg(bundle, "bundle");
    require_arg(image_path, "image");
    require_arg(report, "report");
    PredictInput in;
    in.image = load_image(image_path);
    if (eyes4) in.eyes = EyePair{{eyes4[0], eyes4[1]}, {eyes4[2], eyes4[3]}};
    if (landmarks_path) {
      const ExtractorConfig* aam_cfg = nullptr;
      for (const auto& [name, head] : bundle->bundle.heads)
        if (head.extractor.kind == ExtractorKind::Aam) aam_cfg = &head.extractor;
      LandmarkScheme scheme = aam_cfg ? aam_cfg->scheme : LandmarkScheme::Fgnet68;
      int custom_n = aam_cfg ? aam_cfg->scheme_custom_n : 68;
      in.landmarks = load_landmarks(landmarks_path, scheme, custom_n);
    }
    AttributeReport rep = predict_all(in, bundle->bundle);
    *report = dup_string(as_json ? report_json(rep) : report_text(rep));
  });
}

fp_status fp_evaluate(const fp_bundle* bundle, const char* manifest_path, const char* task,
                      const char* report_csv_path, char** summary, char** err) {
  return guarded(err, [&] {
    require_arg(bundle, "bundle");
    require_arg(manifest_path, "manifest");
    std::vector<DatasetRecord> records = load_manifest(manifest_path);

    std::vector<std::string> tokens;
    if (task) {
      tokens.push_back(task);
    } else {
      bool cascade = bundle->bundle.heads.count("age_male") &&
                     bundle->bundle.heads.count("age_female") &&
                     bundle->bundle.heads.count("gender");
      for (const auto& [name, head] : bundle->bundle.heads) {
        if (name == "age_male" || name == "age_female") continue;
        tokens.push_back(name);
      }
      if (cascade) tokens.push_back("age-cascade");
    }
    if (tokens.empty()) raise_data("evaluate: bundle has no evaluable heads");

    std::string csv, text;
    for (const auto& token : tokens) {
      EvalResult r = evaluate_token(bundle->bundle, token, records);
      csv += eval_csv(r);
      text += eval_text_summary(r) + "\n";
    }
    if (report_csv_path) {
      std::ofstream out(report_csv_path, std::ios::binary | std::ios::trunc);
      if (!out) raise_data(std::string(report_csv_path) + ": cannot open for writing");
      out << csv;
      if (!out) raise_data(std::string(report_csv_path) + ": write failed");
    }
    if (summary) *summary = dup_string(text);
  });
}

fp_status fp_benchmark(const fp_bundle* bundle, const char* manifest_path, char** table,
                       char** err) {
  return guarded(err, [&] {
    require_arg(bundle, "bundle");
    require_arg(manifest_path, "manifest");
    require_arg(table, "table");
    std::vector<DatasetRecord> records = load_manifest(manifest_path);
    BenchmarkResult r = benchmark_bundle(records, bundle->bundle);
    *table = dup_string(benchmark_table(r));
  });
}

fp_status fp_inspect_aam(const fp_bundle* bundle, int mode_index, const char* out_dir,
                         char** err) {
  return guarded(err, [&] {
    require_arg(bundle, "bundle");
    require_arg(out_dir, "out_dir");
    const AppearanceModel* model = nullptr;
    std::string head_name;
    for (const auto& [name, head] : bundle->bundle.heads) {
      if (head.aam) {
        model = &*head.aam;
        head_name = name;
        break;
      }
    }
    if (!model) raise_data("inspect-aam: bundle has no AAM head");
    std::filesystem::create_directories(out_dir);
    std::vector<double> multiples = {-3, -2, -1, 0, 1, 2, 3};
    std::vector<ModeRender> renders = synthesize_modes(*model, mode_index, multiples);
    for (const auto& render : renders) {
      ImageMatrix img = render.texture;
      for (const auto& pt : render.shape_points) {
        int r = int(std::lround(pt.y)), c = int(std::lround(pt.x));
        if (r >= 0 && r < img.rows && c >= 0 && c < img.cols) img.at(r, c) = 255.0;
      }
      char name[96];
      std::snprintf(name, sizeof name, "%s_mode%d_%+d.png", head_name.c_str(), mode_index,
                    int(render.multiple));
      save_png(img, (std::filesystem::path(out_dir) / name).string());
    }
  });
}

}  // extern "C"
