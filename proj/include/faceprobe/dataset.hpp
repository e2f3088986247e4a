#pragma once

#include <optional>
#include <string>
#include <vector>

#include "faceprobe/core.hpp"

namespace fp {

struct Point2 {
  double x = 0.0, y = 0.0;
};

struct EyePair {
  Point2 left, right;  // "left" = smaller x in image coordinates
};

enum class Gender { Male, Female };
enum class Expression { Anger, Disgust, Fear, Happy, Sad, Surprise };
enum class Ethnicity { White, Black, Indian, Other };

const std::vector<std::string>& gender_tokens();
const std::vector<std::string>& expression_tokens();
const std::vector<std::string>& ethnicity_tokens();

enum class LandmarkScheme { Fgnet68, Cohn68, Custom };

// Ordered 2-D annotation points for one face.
struct LandmarkSet {
  std::vector<Point2> points;
  LandmarkScheme scheme = LandmarkScheme::Fgnet68;
  int custom_n = 0;  // expected count when scheme == Custom
};

int landmark_scheme_count(LandmarkScheme scheme, int custom_n);
std::string landmark_scheme_token(LandmarkScheme scheme, int custom_n);
// Parses "fgnet68", "cohn68" or "custom:<n>".
void parse_landmark_scheme(const std::string& token, LandmarkScheme& scheme, int& custom_n);

struct DatasetRecord {
  std::string image_path;           // as written in the manifest
  std::string image_path_resolved;  // relative paths resolved against the manifest dir
  std::optional<EyePair> eyes;
  std::optional<std::string> landmarks_path;
  std::optional<std::string> landmarks_path_resolved;
  std::optional<Gender> gender;
  std::optional<int> age_years;
  std::optional<Expression> expression;
  std::optional<Ethnicity> ethnicity;
};

// Manifest CSV with the fixed header
// image,left_eye_x,left_eye_y,right_eye_x,right_eye_y,landmarks,gender,age,expression,ethnicity
std::vector<DatasetRecord> load_manifest(const std::string& path);
void save_manifest(const std::vector<DatasetRecord>& records, const std::string& path);

// Points file: line 1 "n_points: N", then N lines "x y".
LandmarkSet load_landmarks(const std::string& path, LandmarkScheme scheme, int custom_n = 0);
void save_landmarks(const LandmarkSet& lm, const std::string& path);

// Similarity transform mapping the two eye centers onto canonical positions
// (0.3*cols, 0.35*rows) and (0.7*cols, 0.35*rows) of the output frame.
// Bilinear sampling, out-of-source reads are 0.
ImageMatrix normalize_face(const ImageMatrix& img, Point2 left_eye, Point2 right_eye,
                           int out_rows = 65, int out_cols = 60);

// Global 256-bin equalization, v -> round(255 * cdf(bin(v)) / N).
ImageMatrix histogram_equalize(const ImageMatrix& img);

}  // namespace fp
