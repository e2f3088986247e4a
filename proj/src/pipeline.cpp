#include "faceprobe/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "faceprobe/image_io.hpp"
#include "faceprobe/serialize.hpp"

namespace fp {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

const GaborBank& cached_bank(const GaborBankParams& p) {
  static std::mutex mu;
  static std::map<std::string, GaborBank> cache;
  std::ostringstream key;
  key.precision(17);
  key << p.sigma << ':' << p.k_max << ':' << p.f << ':' << p.n_scales << ':' << p.n_orients << ':'
      << p.kernel_size;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key.str());
  if (it == cache.end()) it = cache.emplace(key.str(), build_gabor_bank(p)).first;
  return it->second;
}

int true_class_of(const DatasetRecord& r, Task task) {
  switch (task) {
    case Task::Gender:
      if (!r.gender) raise_data(r.image_path + ": record is missing the gender label");
      return int(*r.gender);
    case Task::Age:
    case Task::AgeMale:
    case Task::AgeFemale:
      if (!r.age_years) raise_data(r.image_path + ": record is missing the age label");
      return age_bin(*r.age_years);
    case Task::Expression:
      if (!r.expression) raise_data(r.image_path + ": record is missing the expression label");
      return int(*r.expression);
    case Task::Ethnicity:
      if (!r.ethnicity) raise_data(r.image_path + ": record is missing the ethnicity label");
      return int(*r.ethnicity);
  }
  raise_data("unknown task");
}

LandmarkSet load_record_landmarks(const DatasetRecord& r, const ExtractorConfig& cfg) {
  if (!r.landmarks_path_resolved)
    raise_data(r.image_path + ": record is missing the landmark file required by the AAM pipeline");
  return load_landmarks(*r.landmarks_path_resolved, cfg.scheme, cfg.scheme_custom_n);
}

EyePair record_eyes(const DatasetRecord& r) {
  if (!r.eyes)
    raise_data(r.image_path + ": record is missing the eye coordinates required by this pipeline");
  return *r.eyes;
}

struct PredictStage {
  double extract_ms = 0.0, project_ms = 0.0, classify_ms = 0.0;
  int n_extractions = 0;
};

// Classifies one head, reusing raw extractions across heads by key.
HeadResult run_head(const TaskModel& head, const PredictInput& in,
                    std::map<std::string, FeatureVector>& cache, PredictStage& stage) {
  std::string key = head.extraction_key();
  auto it = cache.find(key);
  if (it == cache.end()) {
    Clock::time_point t0 = Clock::now();
    FeatureVector raw = extract_features(in.image, in.eyes, in.landmarks, head.extractor,
                                         head.aam ? &*head.aam : nullptr);
    stage.extract_ms += ms_since(t0);
    stage.n_extractions += 1;
    it = cache.emplace(std::move(key), std::move(raw)).first;
  }
  const FeatureVector& raw = it->second;

  Eigen::VectorXd reduced;
  if (head.pca) {
    Clock::time_point t0 = Clock::now();
    Eigen::Map<const Eigen::VectorXd> v(raw.values.data(), long(raw.values.size()));
    reduced = pca_project(*head.pca, Eigen::VectorXd(v));
    stage.project_ms += ms_since(t0);
  } else {
    reduced = Eigen::Map<const Eigen::VectorXd>(raw.values.data(), long(raw.values.size()));
  }

  Clock::time_point t0 = Clock::now();
  ClassDecision d = classify(head.mlp, reduced, int(head.labels.size()));
  stage.classify_ms += ms_since(t0);
  HeadResult res;
  res.label = head.labels[size_t(d.index)];
  res.scores = d.scores;
  return res;
}

std::string fmt_ms(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << v;
  return os.str();
}

std::string fmt_pct(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::string task_token(Task task) {
  switch (task) {
    case Task::Gender: return "gender";
    case Task::Age: return "age";
    case Task::AgeMale: return "age_male";
    case Task::AgeFemale: return "age_female";
    case Task::Expression: return "expression";
    case Task::Ethnicity: return "ethnicity";
  }
  return "";
}

Task parse_task_token(const std::string& token) {
  if (token == "gender") return Task::Gender;
  if (token == "age") return Task::Age;
  if (token == "age_male") return Task::AgeMale;
  if (token == "age_female") return Task::AgeFemale;
  if (token == "expression") return Task::Expression;
  if (token == "ethnicity") return Task::Ethnicity;
  raise_usage("unknown task '" + token +
              "' (allowed: gender, age, age_male, age_female, expression, ethnicity)");
}

const std::vector<std::string>& age_range_labels() {
  static const std::vector<std::string> labels = {"0-10",  "10-20", "20-30",
                                                  "30-40", "40-50", "50-60"};
  return labels;
}

int age_bin(int years) {
  if (years < 0 || years > 60)
    raise_data("age " + std::to_string(years) + " outside the supported range 0-60");
  return std::min(years / 10, 5);
}

std::vector<std::string> task_labels(Task task) {
  switch (task) {
    case Task::Gender: return gender_tokens();
    case Task::Age:
    case Task::AgeMale:
    case Task::AgeFemale: return age_range_labels();
    case Task::Expression: return expression_tokens();
    case Task::Ethnicity: return ethnicity_tokens();
  }
  return {};
}

std::string extractor_token(ExtractorKind kind) {
  switch (kind) {
    case ExtractorKind::Aam: return "aam";
    case ExtractorKind::Gabor: return "gabor";
    case ExtractorKind::Lbp: return "lbp";
    case ExtractorKind::Wd: return "wd";
  }
  return "";
}

ExtractorKind parse_extractor_token(const std::string& token) {
  if (token == "aam") return ExtractorKind::Aam;
  if (token == "gabor") return ExtractorKind::Gabor;
  if (token == "lbp") return ExtractorKind::Lbp;
  if (token == "wd") return ExtractorKind::Wd;
  raise_usage("unknown extractor '" + token + "' (allowed: aam, gabor, lbp, wd)");
}

std::string TaskModel::extraction_key() const {
  std::ostringstream key;
  key.precision(17);
  key << extractor_token(extractor.kind) << '|' << extractor.pre.out_rows << 'x'
      << extractor.pre.out_cols << '|' << (extractor.pre.equalize ? 1 : 0) << '|';
  switch (extractor.kind) {
    case ExtractorKind::Gabor:
      key << extractor.gabor.sigma << ',' << extractor.gabor.k_max << ',' << extractor.gabor.f
          << ',' << extractor.gabor.n_scales << ',' << extractor.gabor.n_orients << ','
          << extractor.gabor.kernel_size << ',' << extractor.grid_step;
      break;
    case ExtractorKind::Lbp:
      key << extractor.blocks_rows << ',' << extractor.blocks_cols;
      break;
    case ExtractorKind::Wd:
      key << extractor.wavelet_levels;
      break;
    case ExtractorKind::Aam:
      // each trained appearance model is its own extraction
      key << static_cast<const void*>(aam ? &*aam : nullptr);
      break;
  }
  return key.str();
}

FeatureVector extract_features(const ImageMatrix& image, const std::optional<EyePair>& eyes,
                               const std::optional<LandmarkSet>& landmarks,
                               const ExtractorConfig& config, const AppearanceModel* aam) {
  if (config.kind == ExtractorKind::Aam) {
    if (!aam) raise_data("extract_features: AAM extractor requested but no appearance model given");
    if (!landmarks) raise_data("extract_features: AAM extractor requires landmarks");
    return appearance_params(image, *landmarks, *aam);
  }
  if (!eyes) raise_data("extract_features: this extractor requires eye coordinates");
  ImageMatrix norm =
      normalize_face(image, eyes->left, eyes->right, config.pre.out_rows, config.pre.out_cols);
  if (config.pre.equalize) norm = histogram_equalize(norm);
  switch (config.kind) {
    case ExtractorKind::Gabor:
      return gabor_features(norm, cached_bank(config.gabor), config.grid_step);
    case ExtractorKind::Lbp:
      return lbp_block_histograms(norm, config.blocks_rows, config.blocks_cols);
    case ExtractorKind::Wd:
      return wavelet_features(norm, daubechies8_filters(), config.wavelet_levels);
    default:
      raise_data("extract_features: unknown extractor");
  }
}

std::vector<std::string> preset_names() {
  return {"gender-cohn", "gender-fgnet", "age-fgnet", "expression-cohn", "ethnicity-mixed"};
}

void apply_preset(TrainOptions& opts, const std::string& name) {
  struct Preset {
    const char* name;
    int hidden, iters, texture;
  };
  static const Preset presets[] = {
      {"gender-cohn", 500, 5000, 200},   {"gender-fgnet", 1000, 6500, 350},
      {"age-fgnet", 1200, 8000, 350},    {"expression-cohn", 200, 5000, 150},
      {"ethnicity-mixed", 200, 5000, 250},
  };
  for (const auto& p : presets) {
    if (name == p.name) {
      opts.mlp.n_hidden = p.hidden;
      opts.mlp.n_iterations = p.iters;
      opts.extractor.texture_size = p.texture;
      return;
    }
  }
  std::string all;
  for (const auto& p : presets) all += std::string(all.empty() ? "" : ", ") + p.name;
  raise_usage("unknown preset '" + name + "' (available: " + all + ")");
}

TaskModel train_task(const std::vector<DatasetRecord>& records, Task task, ExtractorKind kind,
                     const TrainOptions& opts) {
  if (records.empty()) raise_data("train_task: empty training set");
  TaskModel model;
  model.task = task;
  model.extractor = opts.extractor;
  model.extractor.kind = kind;
  model.labels = task_labels(task);

  std::vector<int> classes(records.size());
  std::set<int> distinct;
  for (size_t i = 0; i < records.size(); ++i) {
    classes[i] = true_class_of(records[i], task);
    distinct.insert(classes[i]);
  }
  if (distinct.size() < 2)
    raise_data("train_task: single-class training set for task '" + task_token(task) + "'");

  Eigen::MatrixXd inputs;
  if (kind == ExtractorKind::Aam) {
    std::vector<AamTrainInput> aam_inputs;
    aam_inputs.reserve(records.size());
    for (const auto& r : records) {
      AamTrainInput in;
      in.image = load_image(r.image_path_resolved);
      in.landmarks = load_record_landmarks(r, model.extractor);
      aam_inputs.push_back(std::move(in));
    }
    AamBuildResult built = build_appearance_model(aam_inputs, model.extractor.texture_size,
                                                  model.extractor.variance_keep);
    model.aam = std::move(built.model);
    inputs = built.training_params.transpose();
  } else {
    std::vector<FeatureVector> raw;
    raw.reserve(records.size());
    for (const auto& r : records) {
      ImageMatrix img = load_image(r.image_path_resolved);
      raw.push_back(extract_features(img, record_eyes(r), std::nullopt, model.extractor, nullptr));
    }
    model.pca = fit_pca(raw, opts.pca_retention);
    inputs.resize(long(raw.size()), model.pca->n_components());
    for (size_t i = 0; i < raw.size(); ++i) {
      Eigen::Map<const Eigen::VectorXd> v(raw[i].values.data(), long(raw[i].values.size()));
      inputs.row(long(i)) = pca_project(*model.pca, Eigen::VectorXd(v)).transpose();
    }
  }

  TargetScheme scheme =
      kind == ExtractorKind::Aam ? TargetScheme::PlusMinusOne : TargetScheme::ZeroOne;
  Eigen::MatrixXd targets = encode_targets(classes, int(model.labels.size()), scheme);
  TrainResult trained = train_mlp(inputs, targets, opts.mlp);
  model.mlp = std::move(trained.model);
  model.mlp.target_scheme = scheme;
  return model;
}

CascadeModels train_age_cascade(const std::vector<DatasetRecord>& records, ExtractorKind kind,
                                const TrainOptions& gender_opts, const TrainOptions& age_opts) {
  CascadeModels out;
  out.gender = train_task(records, Task::Gender, kind, gender_opts);

  std::vector<DatasetRecord> male, female;
  for (const auto& r : records) {
    if (!r.gender) raise_data(r.image_path + ": cascade training requires the gender label");
    if (!r.age_years) raise_data(r.image_path + ": cascade training requires the age label");
    (*r.gender == Gender::Male ? male : female).push_back(r);
  }
  auto check_partition = [](const std::vector<DatasetRecord>& part, const char* which) {
    std::set<int> bins;
    for (const auto& r : part) bins.insert(age_bin(*r.age_years));
    if (bins.size() < 2)
      raise_data(std::string("train_age_cascade: ") + which +
                 " partition has fewer than 2 age classes");
  };
  check_partition(male, "male");
  check_partition(female, "female");
  out.age_male = train_task(male, Task::AgeMale, kind, age_opts);
  out.age_female = train_task(female, Task::AgeFemale, kind, age_opts);
  return out;
}

const TaskModel& require_head(const ModelBundle& bundle, const std::string& name) {
  auto it = bundle.heads.find(name);
  if (it == bundle.heads.end()) {
    std::string have;
    for (const auto& [k, v] : bundle.heads) have += (have.empty() ? "" : ", ") + k;
    raise_data("model bundle has no '" + name + "' head (available: " +
               (have.empty() ? "none" : have) + ")");
  }
  return it->second;
}

AttributeReport predict_all(const PredictInput& input, const ModelBundle& bundle) {
  Clock::time_point t_total = Clock::now();
  const TaskModel& gender = require_head(bundle, "gender");
  const TaskModel& expression = require_head(bundle, "expression");
  const TaskModel& ethnicity = require_head(bundle, "ethnicity");
  bool cascade = bundle.heads.count("age_male") || bundle.heads.count("age_female");
  const TaskModel* age_male = nullptr;
  const TaskModel* age_female = nullptr;
  const TaskModel* age_flat = nullptr;
  if (cascade) {
    age_male = &require_head(bundle, "age_male");
    age_female = &require_head(bundle, "age_female");
  } else {
    age_flat = &require_head(bundle, "age");
  }

  AttributeReport report;
  std::map<std::string, FeatureVector> cache;
  PredictStage stage;
  report.gender = run_head(gender, input, cache, stage);
  if (cascade) {
    const TaskModel& head = report.gender.label == "male" ? *age_male : *age_female;
    report.age_range = run_head(head, input, cache, stage);
  } else {
    report.age_range = run_head(*age_flat, input, cache, stage);
  }
  report.expression = run_head(expression, input, cache, stage);
  report.ethnicity = run_head(ethnicity, input, cache, stage);

  report.timings.extract_ms = stage.extract_ms;
  report.timings.project_ms = stage.project_ms;
  report.timings.classify_ms = stage.classify_ms;
  report.timings.n_extractions = stage.n_extractions;
  report.timings.total_ms = ms_since(t_total);
  return report;
}

namespace {

struct RecordScore {
  int true_class = 0, predicted = 0;
  PredictStage stage;
  double total_ms = 0.0;
};

EvalResult summarize(Task task, const std::vector<RecordScore>& scores) {
  EvalResult r;
  r.task = task;
  r.labels = task_labels(task);
  r.n_records = int(scores.size());
  const int k = int(r.labels.size());
  r.confusion.assign(size_t(k), std::vector<int>(size_t(k), 0));
  int correct = 0;
  for (const auto& s : scores) {
    r.confusion[size_t(s.true_class)][size_t(s.predicted)] += 1;
    correct += s.true_class == s.predicted;
  }
  r.accuracy = 100.0 * double(correct) / double(scores.size());
  for (int c = 0; c < k; ++c) {
    int row_total = 0;
    for (int p = 0; p < k; ++p) row_total += r.confusion[size_t(c)][size_t(p)];
    if (row_total > 0)
      r.per_class[r.labels[size_t(c)]] =
          100.0 * double(r.confusion[size_t(c)][size_t(c)]) / double(row_total);
  }
  auto sum_rows = [&scores](int n) {
    TimingRow row;
    row.n_images = n;
    for (int i = 0; i < n; ++i) {
      row.extract_ms += scores[size_t(i)].stage.extract_ms;
      row.project_ms += scores[size_t(i)].stage.project_ms;
      row.classify_ms += scores[size_t(i)].stage.classify_ms;
      row.total_ms += scores[size_t(i)].total_ms;
    }
    return row;
  };
  r.time_one = sum_rows(std::min(1, r.n_records));
  r.time_ten = sum_rows(std::min(10, r.n_records));
  r.time_all = sum_rows(r.n_records);
  return r;
}

RecordScore score_one(const DatasetRecord& rec, const TaskModel& model, Task label_task) {
  RecordScore s;
  s.true_class = true_class_of(rec, label_task);
  Clock::time_point t0 = Clock::now();
  PredictInput in;
  in.image = load_image(rec.image_path_resolved);
  if (rec.eyes) in.eyes = rec.eyes;
  if (model.extractor.kind == ExtractorKind::Aam)
    in.landmarks = load_record_landmarks(rec, model.extractor);
  std::map<std::string, FeatureVector> cache;
  HeadResult res = run_head(model, in, cache, s.stage);
  s.total_ms = ms_since(t0);
  for (size_t i = 0; i < model.labels.size(); ++i)
    if (model.labels[i] == res.label) s.predicted = int(i);
  return s;
}

}  // namespace

EvalResult evaluate(const std::vector<DatasetRecord>& records, const TaskModel& model) {
  if (records.empty()) raise_data("evaluate: empty test set");
  std::vector<RecordScore> scores;
  scores.reserve(records.size());
  for (const auto& rec : records) scores.push_back(score_one(rec, model, model.task));
  return summarize(model.task, scores);
}

EvalResult evaluate_cascade(const std::vector<DatasetRecord>& records, const TaskModel& gender,
                            const TaskModel& age_male, const TaskModel& age_female) {
  if (records.empty()) raise_data("evaluate: empty test set");
  int routed_male = 0, routed_female = 0;
  std::vector<RecordScore> scores;
  scores.reserve(records.size());
  for (const auto& rec : records) {
    RecordScore s;
    s.true_class = true_class_of(rec, Task::Age);
    Clock::time_point t0 = Clock::now();
    PredictInput in;
    in.image = load_image(rec.image_path_resolved);
    if (rec.eyes) in.eyes = rec.eyes;
    if (gender.extractor.kind == ExtractorKind::Aam ||
        age_male.extractor.kind == ExtractorKind::Aam)
      in.landmarks = load_record_landmarks(rec, gender.extractor);
    std::map<std::string, FeatureVector> cache;
    HeadResult g = run_head(gender, in, cache, s.stage);
    const TaskModel& head = g.label == "male" ? age_male : age_female;
    (g.label == "male" ? routed_male : routed_female) += 1;
    HeadResult a = run_head(head, in, cache, s.stage);
    s.total_ms = ms_since(t0);
    for (size_t i = 0; i < head.labels.size(); ++i)
      if (head.labels[i] == a.label) s.predicted = int(i);
    scores.push_back(std::move(s));
  }
  EvalResult r = summarize(Task::Age, scores);
  r.routed_male = routed_male;
  r.routed_female = routed_female;
  return r;
}

std::string eval_csv(const EvalResult& r) {
  std::ostringstream os;
  os << "metric,value\n";
  os << "task," << task_token(r.task) << "\n";
  os << "n_records," << r.n_records << "\n";
  os << "accuracy," << fmt_pct(r.accuracy) << "\n";
  for (const auto& [label, pct] : r.per_class) os << "per_class." << label << "," << fmt_pct(pct) << "\n";
  if (r.routed_male + r.routed_female > 0) {
    os << "routed_male," << r.routed_male << "\n";
    os << "routed_female," << r.routed_female << "\n";
  }
  auto put_row = [&os](const char* tag, const TimingRow& t) {
    os << tag << ".n_images," << t.n_images << "\n";
    os << tag << ".extract_ms," << fmt_ms(t.extract_ms) << "\n";
    os << tag << ".project_ms," << fmt_ms(t.project_ms) << "\n";
    os << tag << ".classify_ms," << fmt_ms(t.classify_ms) << "\n";
    os << tag << ".total_ms," << fmt_ms(t.total_ms) << "\n";
  };
  put_row("time_1", r.time_one);
  put_row("time_10", r.time_ten);
  put_row("time_all", r.time_all);
  os << "confusion";
  for (const auto& l : r.labels) os << "," << l;
  os << "\n";
  for (size_t i = 0; i < r.labels.size(); ++i) {
    os << r.labels[i];
    for (size_t j = 0; j < r.labels.size(); ++j) os << "," << r.confusion[i][j];
    os << "\n";
  }
  return os.str();
}

std::string eval_text_summary(const EvalResult& r) {
  std::ostringstream os;
  os << "task: " << task_token(r.task) << "  (" << r.n_records << " images)\n";
  os << "accuracy: " << fmt_pct(r.accuracy) << "%\n";
  for (const auto& [label, pct] : r.per_class)
    os << "  " << label << ": " << fmt_pct(pct) << "%\n";
  if (r.routed_male + r.routed_female > 0)
    os << "cascade routing: " << r.routed_male << " male / " << r.routed_female << " female\n";
  os << "timing (extract/project/classify/total ms):\n";
  auto put_row = [&os](const char* tag, const TimingRow& t) {
    os << "  " << tag << " (" << t.n_images << " images): " << fmt_ms(t.extract_ms) << " / "
       << fmt_ms(t.project_ms) << " / " << fmt_ms(t.classify_ms) << " / " << fmt_ms(t.total_ms)
       << "\n";
  };
  put_row("one", r.time_one);
  put_row("ten", r.time_ten);
  put_row("all", r.time_all);
  return os.str();
}

std::string report_json(const AttributeReport& r) {
  nlohmann::json j;
  j["gender"] = r.gender.label;
  j["age_range"] = r.age_range.label;
  j["expression"] = r.expression.label;
  j["ethnicity"] = r.ethnicity.label;
  j["scores"] = {{"gender", r.gender.scores},
                 {"age_range", r.age_range.scores},
                 {"expression", r.expression.scores},
                 {"ethnicity", r.ethnicity.scores}};
  j["timings_ms"] = {{"extract", r.timings.extract_ms},
                     {"project", r.timings.project_ms},
                     {"classify", r.timings.classify_ms},
                     {"total", r.timings.total_ms}};
  return j.dump();
}

BenchmarkResult benchmark_bundle(const std::vector<DatasetRecord>& records,
                                 const ModelBundle& bundle) {
  if (records.empty()) raise_data("benchmark: empty manifest");
  if (bundle.heads.empty()) raise_data("benchmark: model bundle has no heads");
  const ExtractorConfig* aam_cfg = nullptr;
  for (const auto& [name, head] : bundle.heads)
    if (head.extractor.kind == ExtractorKind::Aam) aam_cfg = &head.extractor;

  std::vector<StageTimings> per_image;
  per_image.reserve(records.size());
  for (const auto& rec : records) {
    PredictInput in;
    in.image = load_image(rec.image_path_resolved);
    if (rec.eyes) in.eyes = rec.eyes;
    if (aam_cfg) in.landmarks = load_record_landmarks(rec, *aam_cfg);
    AttributeReport rep = predict_all(in, bundle);
    per_image.push_back(rep.timings);
  }
  auto sum_rows = [&per_image](int n) {
    TimingRow row;
    row.n_images = n;
    for (int i = 0; i < n; ++i) {
      row.extract_ms += per_image[size_t(i)].extract_ms;
      row.project_ms += per_image[size_t(i)].project_ms;
      row.classify_ms += per_image[size_t(i)].classify_ms;
      row.total_ms += per_image[size_t(i)].total_ms;
    }
    return row;
  };
  BenchmarkResult r;
  r.one = sum_rows(std::min<int>(1, int(per_image.size())));
  r.ten = sum_rows(std::min<int>(10, int(per_image.size())));
  r.all = sum_rows(int(per_image.size()));
  return r;
}

std::string benchmark_table(const BenchmarkResult& r) {
  std::ostringstream os;
  os << "images  extract_ms  project_ms  classify_ms  total_ms\n";
  auto put = [&os](const char* tag, const TimingRow& t) {
    os << tag << " (" << t.n_images << ")\t" << fmt_ms(t.extract_ms) << "\t" << fmt_ms(t.project_ms)
       << "\t" << fmt_ms(t.classify_ms) << "\t" << fmt_ms(t.total_ms) << "\n";
  };
  put("one", r.one);
  put("ten", r.ten);
  put("all", r.all);
  return os.str();
}

std::string report_text(const AttributeReport& r) {
  std::ostringstream os;
  os << "gender:     " << r.gender.label << "\n";
  os << "age range:  " << r.age_range.label << "\n";
  os << "expression: " << r.expression.label << "\n";
  os << "ethnicity:  " << r.ethnicity.label << "\n";
  os << "timing: extract " << fmt_ms(r.timings.extract_ms) << " ms, project "
     << fmt_ms(r.timings.project_ms) << " ms, classify " << fmt_ms(r.timings.classify_ms)
     << " ms, total " << fmt_ms(r.timings.total_ms) << " ms\n";
  return os.str();
}

}  // namespace fp
