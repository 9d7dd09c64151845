// localize: command-line front end over the addk C API.
//
//   localize run   --interest-acts A.npy --interest-weights WA.npy
//                  --other-acts B.npy --other-weights WB.npy
//                  --image img.png --alpha 5 --opacity 0.5 --out DIR
//   localize run   --interest-cam C1.npy --other-cam C2.npy --image img.png --out DIR
//   localize sweep --alphas 5,15,50 ... --out DIR
//   localize cam   --acts A.npy --weights WA.npy --image img.png --out DIR
//
// --config FILE reads key=value lines named after the long flags (optionally
// under a [run], [sweep] or [cam] section); flags on the command line win.
//
// Exit codes: 0 success, 2 input/validation error, 3 non-positive CAM
// maximum, 4 I/O error, 1 anything else.

#include "addk/addk.h"

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kInput = 2, kNumeric = 3, kIo = 4 };

int exit_code(addk_status s) {
  switch (s) {
  case ADDK_OK: return kOk;
  case ADDK_ERR_NONPOSITIVE_MAX: return kNumeric;
  case ADDK_ERR_IO: return kIo;
  case ADDK_ERR_INTERNAL: return kInternal;
  default: return kInput;
  }
}

struct ExpertArgs {
  std::string acts, weights, cam, id;
  int class_index = 0;

  void bind(CLI::App *app, const std::string &prefix, const std::string &label,
            const std::string &default_id) {
    const auto flag = [&](const char *name) {
      return "--" + (prefix.empty() ? std::string(name) : prefix + "-" + name);
    };
    id = default_id;
    app->add_option(flag("acts"), acts, label + " activations [C,H,W] (.npy)");
    app->add_option(flag("weights"), weights, label + " class weights [C] (.npy)");
    app->add_option(flag("cam"), cam, label + " precomputed CAM [H,W] (.npy)");
    app->add_option(flag("class"), class_index, label + " class index")
        ->capture_default_str();
    app->add_option(flag("id"), id, label + " model label")->capture_default_str();
  }

  addk_expert view() const {
    const auto opt = [](const std::string &s) { return s.empty() ? nullptr : s.c_str(); };
    return addk_expert{opt(acts), opt(weights), opt(cam), class_index, id.c_str()};
  }
};

struct CommonArgs {
  std::string image, out, stem, size;
  double alpha = 5.0;
  double opacity = 0.5;
};

// "224" or "HxW".
bool parse_size(const std::string &text, size_t &h, size_t &w) {
  if (text.empty()) return true;
  try {
    const auto x = text.find('x');
    std::size_t used = 0;
    if (x == std::string::npos) {
      h = w = std::stoul(text, &used);
      return used == text.size() && h > 0;
    }
    h = std::stoul(text.substr(0, x), &used);
    if (used != x) return false;
    w = std::stoul(text.substr(x + 1), &used);
    return used == text.size() - x - 1 && h > 0 && w > 0;
  } catch (const std::exception &) {
    return false;
  }
}

// Flat key=value files: keys outside any section belong to the subcommand
// being run.
class ScopedConfig : public CLI::ConfigINI {
public:
  explicit ScopedConfig(const CLI::App &app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream &input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    const auto active = app_.get_subcommands();
    if (active.empty()) return items;
    for (auto &item : items)
      if (item.parents.empty()) item.parents.push_back(active.front()->get_name());
    return items;
  }

private:
  const CLI::App &app_;
};

struct ManifestDeleter {
  void operator()(addk_manifest *m) const { addk_manifest_free(m); }
};
using ManifestPtr = std::unique_ptr<addk_manifest, ManifestDeleter>;

int report(addk_status status, addk_manifest *raw) {
  ManifestPtr manifest(raw);
  if (status != ADDK_OK) {
    std::fprintf(stderr, "localize: %s: %s\n", addk_status_name(status),
                 addk_last_error());
    if (status == ADDK_ERR_NONPOSITIVE_MAX)
      std::fprintf(stderr, "localize: hint: check the class index and that the "
                           "expert classified this image positively\n");
    return exit_code(status);
  }
  std::fputs(addk_manifest_text(manifest.get()), stdout);
  std::fprintf(stdout, "manifest=%s\n", addk_manifest_path(manifest.get()));
  return kOk;
}

void add_common(CLI::App *app, CommonArgs &a, bool with_alpha) {
  app->add_option("--image", a.image, "Base image (PNG, RGB or grayscale)");
  app->add_option("--out", a.out, "Output directory")->required();
  app->add_option("--stem", a.stem, "Output file prefix (default: image stem)");
  app->add_option("--opacity", a.opacity, "Heatmap overlay opacity in [0,1]")
      ->capture_default_str();
  if (with_alpha)
    app->add_option("--alpha", a.alpha, "Amplification alpha > 0")
        ->capture_default_str();
  app->add_option("--size", a.size,
                  "Render size N or HxW when no image is given (default 224)");
}

addk_pipeline_config make_config(const CommonArgs &a, const ExpertArgs &interest,
                                 const ExpertArgs *other) {
  addk_pipeline_config c;
  addk_pipeline_config_init(&c);
  c.interest = interest.view();
  if (other) c.other = other->view();
  c.image = a.image.empty() ? nullptr : a.image.c_str();
  c.alpha = a.alpha;
  c.opacity = a.opacity;
  c.output_dir = a.out.c_str();
  c.stem = a.stem.empty() ? nullptr : a.stem.c_str();
  return c;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Discriminative localization with the amplified directed "
               "divergence kernel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(addk_version()));
  app.set_config("--config", "", "key=value file mirroring the flags");
  app.config_formatter(std::make_shared<ScopedConfig>(app));
  app.fallthrough();

  ExpertArgs interest, other, single;
  CommonArgs run_args, sweep_args, cam_args;
  std::vector<double> alphas;

  auto *run = app.add_subcommand("run", "Both CAM overlays plus the kernel overlay and heatmap");
  interest.bind(run, "interest", "Class-of-interest expert", "N1");
  other.bind(run, "other", "Competing expert", "N2");
  add_common(run, run_args, true);

  auto *sweep = app.add_subcommand("sweep", "Kernel heatmaps over several alphas");
  ExpertArgs sweep_interest, sweep_other;
  sweep_interest.bind(sweep, "interest", "Class-of-interest expert", "N1");
  sweep_other.bind(sweep, "other", "Competing expert", "N2");
  add_common(sweep, sweep_args, false);
  sweep->add_option("--alphas", alphas, "Comma-separated alphas")
      ->delimiter(',')
      ->required();

  auto *cam = app.add_subcommand("cam", "Single-expert CAM overlay");
  single.bind(cam, "", "Expert", "N1");
  add_common(cam, cam_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  const auto size_of = [](const CommonArgs &a, addk_pipeline_config &c) {
    if (!parse_size(a.size, c.display_height, c.display_width)) {
      std::fprintf(stderr, "localize: invalid --size '%s'\n", a.size.c_str());
      return false;
    }
    return true;
  };

  addk_manifest *manifest = nullptr;
  if (*run) {
    auto c = make_config(run_args, interest, &other);
    if (!size_of(run_args, c)) return kInput;
    const auto status = addk_run_pipeline(&c, &manifest);
    return report(status, manifest);
  }
  if (*sweep) {
    auto c = make_config(sweep_args, sweep_interest, &sweep_other);
    if (!size_of(sweep_args, c)) return kInput;
    const auto status = addk_alpha_sweep(&c, alphas.data(), alphas.size(), &manifest);
    return report(status, manifest);
  }
  auto c = make_config(cam_args, single, nullptr);
  if (!size_of(cam_args, c)) return kInput;
  const auto status = addk_cam_overlay(&c, &manifest);
  return report(status, manifest);
}
