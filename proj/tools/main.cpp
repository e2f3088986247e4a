// faceprobe command-line tool. Everything heavier than flag parsing goes
// through the C API in faceprobe.h.
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "faceprobe.h"

namespace {

struct ErrGuard {
  char* msg = nullptr;
  ~ErrGuard() { fp_free(msg); }
};

struct StrGuard {
  char* s = nullptr;
  ~StrGuard() { fp_free(s); }
};

int finish(fp_status status, const ErrGuard& err) {
  if (status != FP_OK)
    std::fprintf(stderr, "faceprobe: %s\n", err.msg ? err.msg : "unknown error");
  return int(status);
}

bool parse_eyes(const std::string& spec, double out[4]) {
  char extra = 0;
  return std::sscanf(spec.c_str(), "%lf,%lf,%lf,%lf%c", &out[0], &out[1], &out[2], &out[3],
                     &extra) == 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"faceprobe — gender / age-range / expression / ethnicity analysis of face images"};
  app.require_subcommand(1);

  // synth
  std::string synth_spec, synth_out;
  uint64_t synth_seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  synth->add_option("--spec", synth_spec, "Corpus spec file (defaults built in)");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "RNG seed")->default_val(0);

  // train
  std::string train_manifest, train_task, train_extractor, train_preset, train_out;
  int train_hidden = 0, train_texture = 0, train_grid = 0;
  long train_iters = 0;
  double train_lr = 0.0, train_goal = 0.0, train_pca = 0.0, train_vk = 0.0;
  uint64_t train_seed = 0;
  auto* train = app.add_subcommand("train", "Train a task head into a model bundle");
  train->add_option("--manifest", train_manifest, "Training manifest CSV")->required();
  train->add_option("--task", train_task, "gender | age | age-cascade | expression | ethnicity")
      ->required();
  train->add_option("--extractor", train_extractor, "aam | gabor | lbp | wd")->required();
  train->add_option("--preset", train_preset, "Named preset (e.g. gender-fgnet)");
  train->add_option("--hidden", train_hidden, "Hidden units");
  train->add_option("--iters", train_iters, "Training iterations");
  train->add_option("--lr", train_lr, "Learning rate");
  train->add_option("--goal", train_goal, "MSE goal");
  train->add_option("--seed", train_seed, "RNG seed")->default_val(0);
  train->add_option("--pca", train_pca, "PCA retention: count (>=1) or variance fraction (0,1)");
  train->add_option("--texture-size", train_texture, "AAM texture frame size");
  train->add_option("--grid-step", train_grid, "Gabor sampling step");
  train->add_option("--variance-keep", train_vk, "AAM PCA variance retention");
  train->add_option("--out", train_out, "Output bundle (.fprb); merges when it exists")
      ->required();

  // predict
  std::string pred_models, pred_image, pred_eyes, pred_landmarks;
  bool pred_json = false;
  auto* predict = app.add_subcommand("predict", "Report all four attributes for one image");
  predict->add_option("--models", pred_models, "Model bundle")->required();
  predict->add_option("--image", pred_image, "Image (PNG or PGM)")->required();
  predict->add_option("--eyes", pred_eyes, "Eye centers: lx,ly,rx,ry");
  predict->add_option("--landmarks", pred_landmarks, "Landmark points file (AAM heads)");
  predict->add_flag("--json", pred_json, "Emit the JSON report schema");

  // evaluate
  std::string eval_models, eval_manifest, eval_report, eval_task;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate bundle heads on a labeled manifest");
  evaluate->add_option("--models", eval_models, "Model bundle")->required();
  evaluate->add_option("--manifest", eval_manifest, "Test manifest CSV")->required();
  evaluate->add_option("--report", eval_report, "CSV report output path");
  evaluate->add_option("--task", eval_task, "Restrict to one head (or age-cascade)");

  // benchmark
  std::string bench_models, bench_manifest;
  auto* benchmark = app.add_subcommand("benchmark", "1/10/all-images timing table");
  benchmark->add_option("--models", bench_models, "Model bundle")->required();
  benchmark->add_option("--manifest", bench_manifest, "Manifest CSV")->required();

  // inspect-aam
  std::string insp_models, insp_out;
  int insp_mode = 0;
  auto* inspect = app.add_subcommand("inspect-aam", "Render appearance-mode variations");
  inspect->add_option("--models", insp_models, "Model bundle")->required();
  inspect->add_option("--mode", insp_mode, "Appearance mode index")->required();
  inspect->add_option("--out", insp_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ErrGuard err;
  if (*synth) {
    fp_status st = fp_synth(synth_spec.empty() ? nullptr : synth_spec.c_str(), synth_out.c_str(),
                            synth_seed, &err.msg);
    return finish(st, err);
  }
  if (*train) {
    fp_train_options opts{};
    opts.preset = train_preset.empty() ? nullptr : train_preset.c_str();
    opts.hidden = train_hidden;
    opts.iterations = train_iters;
    opts.learning_rate = train_lr;
    opts.goal_mse = train_goal;
    opts.seed = train_seed;
    opts.pca = train_pca;
    opts.texture_size = train_texture;
    opts.grid_step = train_grid;
    opts.variance_keep = train_vk;
    fp_status st = fp_train(train_manifest.c_str(), train_task.c_str(), train_extractor.c_str(),
                            &opts, train_out.c_str(), &err.msg);
    return finish(st, err);
  }

  // remaining subcommands operate on an opened bundle
  const std::string& bundle_path = *predict ? pred_models
                                   : *evaluate ? eval_models
                                   : *benchmark ? bench_models
                                                : insp_models;
  fp_bundle* bundle = nullptr;
  fp_status st = fp_bundle_open(bundle_path.c_str(), &bundle, &err.msg);
  if (st != FP_OK) return finish(st, err);
  std::unique_ptr<fp_bundle, decltype(&fp_bundle_close)> guard(bundle, fp_bundle_close);

  if (*predict) {
    double eyes[4];
    const double* eyes_ptr = nullptr;
    if (!pred_eyes.empty()) {
      if (!parse_eyes(pred_eyes, eyes)) {
        std::fprintf(stderr, "faceprobe: --eyes expects lx,ly,rx,ry\n");
        return 1;
      }
      eyes_ptr = eyes;
    }
    StrGuard report;
    st = fp_predict(bundle, pred_image.c_str(), eyes_ptr,
                    pred_landmarks.empty() ? nullptr : pred_landmarks.c_str(), pred_json ? 1 : 0,
                    &report.s, &err.msg);
    if (st == FP_OK) std::printf("%s\n", report.s);
    return finish(st, err);
  }
  if (*evaluate) {
    StrGuard summary;
    st = fp_evaluate(bundle, eval_manifest.c_str(), eval_task.empty() ? nullptr : eval_task.c_str(),
                     eval_report.empty() ? nullptr : eval_report.c_str(), &summary.s, &err.msg);
    if (st == FP_OK) std::printf("%s", summary.s);
    return finish(st, err);
  }
  if (*benchmark) {
    StrGuard table;
    st = fp_benchmark(bundle, bench_manifest.c_str(), &table.s, &err.msg);
    if (st == FP_OK) std::printf("%s", table.s);
    return finish(st, err);
  }
  if (*inspect) {
    st = fp_inspect_aam(bundle, insp_mode, insp_out.c_str(), &err.msg);
    return finish(st, err);
  }
  return 1;
}
