#pragma once

#include <map>
#include <optional>

#include "faceprobe/aam.hpp"
#include "faceprobe/dataset.hpp"
#include "faceprobe/gabor.hpp"
#include "faceprobe/lbp.hpp"
#include "faceprobe/mlp.hpp"
#include "faceprobe/pca.hpp"
#include "faceprobe/wavelet.hpp"

namespace fp {

enum class Task { Gender, Age, AgeMale, AgeFemale, Expression, Ethnicity };

std::string task_token(Task task);
Task parse_task_token(const std::string& token);
std::vector<std::string> task_labels(Task task);

// Six lower-inclusive 10-year ranges, 60 included in the last.
int age_bin(int years);
const std::vector<std::string>& age_range_labels();

enum class ExtractorKind { Aam, Gabor, Lbp, Wd };
std::string extractor_token(ExtractorKind kind);
ExtractorKind parse_extractor_token(const std::string& token);

struct PreprocessConfig {
  int out_rows = 65, out_cols = 60;
  bool equalize = true;
};

struct ExtractorConfig {
  ExtractorKind kind = ExtractorKind::Lbp;
  PreprocessConfig pre;
  // gabor
  GaborBankParams gabor;
  int grid_step = 4;
  // lbp
  int blocks_rows = 9, blocks_cols = 9;
  // wd
  int wavelet_levels = 2;
  // aam
  int texture_size = 96;
  double variance_keep = 0.98;
  LandmarkScheme scheme = LandmarkScheme::Fgnet68;
  int scheme_custom_n = 68;
};

struct TaskModel {
  Task task = Task::Gender;
  ExtractorConfig extractor;
  std::optional<PcaModel> pca;          // absent for AAM
  std::optional<AppearanceModel> aam;   // present for AAM
  MlpModel mlp;
  std::vector<std::string> labels;

  // Extraction identity: heads whose key matches share one raw extraction.
  std::string extraction_key() const;
};

struct ModelBundle {
  // keys are task tokens: gender, age, age_male, age_female, expression, ethnicity
  std::map<std::string, TaskModel> heads;
};

struct TrainOptions {
  TrainConfig mlp;
  PcaRetention pca_retention = PcaRetention::all();
  ExtractorConfig extractor;  // kind is set by the caller
};

// Named presets with the hidden/iteration/texture configurations of the
// task/database pairs; overridable field by field.
std::vector<std::string> preset_names();
void apply_preset(TrainOptions& opts, const std::string& name);

TaskModel train_task(const std::vector<DatasetRecord>& records, Task task, ExtractorKind kind,
                     const TrainOptions& opts);

struct CascadeModels {
  TaskModel gender, age_male, age_female;
};

CascadeModels train_age_cascade(const std::vector<DatasetRecord>& records, ExtractorKind kind,
                                const TrainOptions& gender_opts, const TrainOptions& age_opts);

struct StageTimings {
  double extract_ms = 0.0, project_ms = 0.0, classify_ms = 0.0, total_ms = 0.0;
  int n_extractions = 0;
};

struct HeadResult {
  std::string label;
  std::vector<double> scores;
};

struct AttributeReport {
  HeadResult gender, age_range, expression, ethnicity;
  StageTimings timings;
};

struct PredictInput {
  ImageMatrix image;
  std::optional<EyePair> eyes;
  std::optional<LandmarkSet> landmarks;
};

// Runs the four heads with one raw extraction per distinct extraction_key.
// Gender routes the record to exactly one of the age_male/age_female heads
// when the cascade is present; a flat age head is used otherwise.
AttributeReport predict_all(const PredictInput& input, const ModelBundle& bundle);

struct TimingRow {
  int n_images = 0;
  double extract_ms = 0.0, project_ms = 0.0, classify_ms = 0.0, total_ms = 0.0;
};

struct EvalResult {
  Task task = Task::Gender;
  std::vector<std::string> labels;
  double accuracy = 0.0;  // percent
  std::map<std::string, double> per_class;
  std::vector<std::vector<int>> confusion;  // [true][predicted]
  TimingRow time_one, time_ten, time_all;
  int n_records = 0;
  // cascade routing instrumentation
  int routed_male = 0, routed_female = 0;
};

EvalResult evaluate(const std::vector<DatasetRecord>& records, const TaskModel& model);
EvalResult evaluate_cascade(const std::vector<DatasetRecord>& records, const TaskModel& gender,
                            const TaskModel& age_male, const TaskModel& age_female);

std::string eval_csv(const EvalResult& r);
std::string eval_text_summary(const EvalResult& r);
std::string report_json(const AttributeReport& r);
std::string report_text(const AttributeReport& r);

// predict_all timings over the first 1, first 10 and all manifest images.
struct BenchmarkResult {
  TimingRow one, ten, all;
};
BenchmarkResult benchmark_bundle(const std::vector<DatasetRecord>& records,
                                 const ModelBundle& bundle);
std::string benchmark_table(const BenchmarkResult& r);

void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

// Head lookup; raises a task-mismatch Data error naming the requested and
// available heads when absent.
const TaskModel& require_head(const ModelBundle& bundle, const std::string& name);

// Feature extraction shared by training and inference. For AAM the result is
// the appearance parameter vector; other extractors yield raw features to be
// reduced by the head's PCA stage.
FeatureVector extract_features(const ImageMatrix& image, const std::optional<EyePair>& eyes,
                               const std::optional<LandmarkSet>& landmarks,
                               const ExtractorConfig& config, const AppearanceModel* aam);

}  // namespace fp
