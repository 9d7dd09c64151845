// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include "addk/cam.hpp"
#include "addk/error.hpp"
#include "addk/imaging.hpp"
#include "addk/kernel.hpp"
#include "addk/npy.hpp"
#include "oracles.hpp"

#include <bit>
#include <chrono>
#include <cstring>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <sys/wait.h>

using namespace addk;
namespace fs = std::filesystem;

namespace {

// Collects the first few failure reasons for a criterion.
struct Check {
  std::size_t failures = 0;
  std::ostringstream detail;

  void expect(bool ok, const std::string &what) {
    if (ok) return;
    if (failures++ < 3) detail << (failures > 1 ? "; " : "") << what;
  }
  template <class Fn> void expect_throws(ErrorKind kind, const std::string &what, Fn &&fn) {
    try {
      fn();
    } catch (const Error &e) {
      expect(e.kind() == kind, what + ": wrong kind " + to_string(e.kind()));
      return;
    }
    expect(false, what + ": accepted");
  }
};

fs::path data(const char *name) { return fs::path(ADDK_TEST_DATA) / name; }

std::vector<std::uint8_t> read_bytes(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Tensor abs_values(const Tensor &t) {
  std::vector<float> v(t.data().begin(), t.data().end());
  for (auto &e : v) e = std::fabs(e);
  return Tensor(t.shape(), std::move(v));
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------

void worked_example(Check &c) {
  const auto x = Tensor::matrix({{1, 1, 5}, {0, 6, 4}, {0, 1, 0}});
  const auto xp = Tensor::matrix({{8, 0, 7}, {1, 4, 3}, {1, 2, 1}});
  const double printed[9] = {.0, 12.2, .5, .2, 1808, 79.8, .2, .3, .2};

  const auto t0 = std::chrono::steady_clock::now();
  const auto r = directed_kernel(x, xp, 15.0);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  c.expect(r.raw.has_value(), "raw not representable");
  if (!r.raw) return;
  for (std::size_t i = 0; i < 9; ++i) {
    const double got = (*r.raw)[i];
    c.expect(std::fabs(got - printed[i]) <= std::max(0.5, 0.01 * printed[i]),
             "cell " + std::to_string(i) + " = " + num(got) + " vs " + num(printed[i]));
  }
  c.expect(std::fabs((*r.raw)[5] - 79.44) < 0.01, "cell (1,2) is not 79.44");
  c.expect(secs < 1.0, "took " + num(secs) + " s");
}

void kernel_identity(Check &c) {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> ext(1, 14);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = oracle::random_positive_map(rng, ext(rng), ext(rng));
    for (double alpha : {1.0, 5.0, 15.0, 50.0}) {
      const auto r = directed_kernel(x, x, alpha);
      c.expect(r.raw.has_value(), "raw missing");
      if (!r.raw) continue;
      for (float v : r.raw->data())
        c.expect(std::fabs(v - 1.0) <= 1e-6, "K(x,x) = " + num(v));
    }
  }
}

void reciprocity(Check &c) {
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<std::size_t> ext(1, 14);
  std::uniform_real_distribution<double> adist(0.5, 15.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t h = ext(rng), w = ext(rng);
    const auto x = oracle::random_positive_map(rng, h, w);
    const auto xp = oracle::random_positive_map(rng, h, w);
    const double alpha = adist(rng);
    const auto fwd = directed_kernel(x, xp, alpha), bwd = directed_kernel(xp, x, alpha);
    if (!fwd.raw || !bwd.raw) {
      c.expect(false, "raw missing");
      continue;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double p = double{(*fwd.raw)[i]} * (*bwd.raw)[i];
      c.expect(std::fabs(p - 1.0) <= 1e-5, "K(x,x')K(x',x) = " + num(p));
    }
  }
}

void scale_invariance(Check &c) {
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<std::size_t> ext(1, 14);
  std::uniform_real_distribution<double> cdist(0.0, 100.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t h = ext(rng), w = ext(rng);
    const auto x = oracle::random_positive_map(rng, h, w);
    const auto xp = oracle::random_positive_map(rng, h, w);
    double scale = 0.0;
    while (scale == 0.0) scale = 100.0 - cdist(rng); // (0, 100]
    const auto a = directed_kernel(x, xp, kDefaultAlpha);
    const auto b = directed_kernel(x * scale, xp, kDefaultAlpha);
    for (std::size_t i = 0; i < x.size(); ++i) {
      c.expect(oracle::rel_close((*a.raw)[i], (*b.raw)[i], 1e-6),
               "c=" + num(scale) + ": " + num((*a.raw)[i]) + " vs " + num((*b.raw)[i]));
      c.expect(std::fabs(a.normalized[i] - b.normalized[i]) <= 1e-6, "normalized differs");
    }
  }
}

void concentration_monotone(Check &c) {
  std::mt19937_64 rng(1004);
  std::uniform_int_distribution<std::size_t> ext(2, 14);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t h = ext(rng), w = ext(rng);
    const auto x = oracle::random_positive_map(rng, h, w);
    const auto xp = oracle::random_positive_map(rng, h, w);
    std::size_t prev = x.size();
    for (double alpha : {1.0, 2.0, 5.0, 15.0, 50.0}) {
      const auto n = concentration(directed_kernel(x, xp, alpha), 0.5);
      c.expect(n <= prev, "concentration rose to " + std::to_string(n) + " at alpha " +
                              num(alpha));
      prev = n;
    }
  }
}

void cam_oracle(Check &c) {
  std::mt19937_64 rng(1005);
  std::uniform_int_distribution<std::size_t> chans(1, 2048), ext(1, 7);
  std::uniform_real_distribution<double> sdist(-4.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t ch = trial == 0 ? 2048 : chans(rng);
    const std::size_t h = trial == 0 ? 7 : ext(rng), w = trial == 0 ? 7 : ext(rng);
    const auto f = oracle::random_tensor(rng, {ch, h, w}, 0, 4);
    const auto wa = oracle::random_tensor(rng, {ch}, -1, 1);
    const auto wb = oracle::random_tensor(rng, {ch}, -1, 1);
    const FeatureStack fs_(f);

    const auto cam = compute_cam(fs_, ClassWeights(wa)).map;
    const auto naive = oracle::naive_cam(f, wa);
    // Magnitude of the summed terms bounds float rounding in the result.
    const auto mag = oracle::naive_cam(f, abs_values(wa));
    for (std::size_t i = 0; i < cam.size(); ++i)
      c.expect(std::fabs(cam[i] - naive[i]) <= 1e-4 * std::max(mag[i], 1e-6),
               "cell " + std::to_string(i) + " " + num(cam[i]) + " vs " + num(naive[i]));

    const auto sum = compute_cam(fs_, ClassWeights(wa + wb)).map;
    const auto cb = compute_cam(fs_, ClassWeights(wb)).map;
    const double s = sdist(rng);
    const auto scaled = compute_cam(fs_, ClassWeights(wa * s)).map;
    for (std::size_t i = 0; i < cam.size(); ++i) {
      const double tol = 1e-4 * std::max(1.0, 2 * mag[i]);
      c.expect(std::fabs(sum[i] - (double{cam[i]} + cb[i])) <= tol, "linearity");
      c.expect(std::fabs(scaled[i] - s * cam[i]) <= tol * std::max(1.0, std::fabs(s)),
               "homogeneity");
    }
  }
}

void bilinear(Check &c) {
  std::mt19937_64 rng(1006);
  std::uniform_int_distribution<std::size_t> in(1, 16), out(1, 224);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t ih = in(rng), iw = in(rng);
    const std::size_t oh = trial < 10 ? 224 : out(rng), ow = trial < 10 ? 224 : out(rng);
    const auto m = oracle::random_tensor(rng, {ih, iw}, -10, 10);
    const auto up = upsample_bilinear(m, oh, ow);
    const float lo = min_value(m), hi = max_value(m);
    c.expect(up.shape() == Tensor::Shape{oh, ow}, "output shape");
    for (std::size_t i = 0; i < oh; ++i)
      for (std::size_t j = 0; j < ow; ++j) {
        const float v = up.at(i, j);
        c.expect(std::fabs(v - oracle::bilinear_at(m, oh, ow, i, j)) <= 1e-5, "oracle");
        c.expect(v >= lo && v <= hi, "out of input range");
      }

    const auto constant = Tensor::filled({ih, iw}, m[0]);
    const auto flat = upsample_bilinear(constant, oh, ow);
    for (float v : flat.data()) c.expect(v == m[0], "constant not preserved");
    c.expect(upsample_bilinear(m, ih, iw) == m, "same-size not identity");
  }
}

void interchange(Check &c) {
  std::mt19937_64 rng(1007);
  std::uniform_int_distribution<int> rank(1, 3);
  std::uniform_int_distribution<std::size_t> ext(1, 12);
  std::uniform_int_distribution<std::uint32_t> bits;
  const auto dir = oracle::scratch_dir("acceptance_npy");
  for (int trial = 0; trial < 1000; ++trial) {
    Tensor::Shape shape(static_cast<std::size_t>(rank(rng)));
    for (auto &e : shape) e = ext(rng);
    std::vector<float> v(shape_volume(shape));
    for (auto &e : v) {
      do e = std::bit_cast<float>(bits(rng));
      while (!std::isfinite(e));
    }
    const Tensor t(shape, v);
    const auto p = dir / ("t" + std::to_string(trial % 16) + ".npy");
    save_tensor(t, p);
    const auto back = load_tensor(p);
    c.expect(back.shape() == t.shape(), "shape changed");
    c.expect(std::memcmp(back.data().data(), t.data().data(), 4 * v.size()) == 0,
             "payload bits changed");
  }

  const auto good = npy::encode(Tensor::matrix({{1, 2}, {3, 4}}));
  const auto rejects = [&](ErrorKind kind, const std::string &what, std::vector<std::uint8_t> b) {
    c.expect_throws(kind, what, [&] { npy::decode(b); });
  };
  auto b = good;
  b[1] = 'X';
  rejects(ErrorKind::Format, "bad magic", b);
  b = good;
  b[6] = 3;
  rejects(ErrorKind::Format, "bad version", b);
  b = good;
  b.pop_back();
  rejects(ErrorKind::Format, "short payload", b);
  b = good;
  b.push_back(0);
  rejects(ErrorKind::Format, "long payload", b);
  b = good;
  b.resize(40);
  rejects(ErrorKind::Format, "truncated header", b);
  b = good;
  std::string header(b.begin() + 10, b.begin() + 128);
  header.replace(header.find("(2, 2)"), 6, "(2, 3)");
  std::copy(header.begin(), header.end(), b.begin() + 10);
  rejects(ErrorKind::Format, "shape/length mismatch", b);
  b = good;
  header.assign(b.begin() + 10, b.begin() + 128);
  header.replace(header.find("'descr'"), 7, "'desxr'");
  std::copy(header.begin(), header.end(), b.begin() + 10);
  rejects(ErrorKind::Format, "garbled key", b);
  c.expect_throws(ErrorKind::UnsupportedDtype, "float64",
                  [] { load_tensor(data("bad_dtype_f8.npy")); });
  c.expect_throws(ErrorKind::UnsupportedDtype, "big-endian",
                  [] { load_tensor(data("bad_dtype_be.npy")); });
  c.expect_throws(ErrorKind::Format, "fortran order",
                  [] { load_tensor(data("bad_fortran.npy")); });
}

// --- CLI --------------------------------------------------------------------

int run_cli(const std::string &args, const fs::path &log) {
  const std::string cmd =
      "\"" + std::string(LOCALIZE_BIN) + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path &p) { return "\"" + p.string() + "\""; }

void cli(Check &c) {
  const auto dir = oracle::scratch_dir("acceptance_cli");
  const std::string inputs = " --interest-cam " + q(data("worked_x.npy")) + " --other-cam " +
                             q(data("worked_xprime.npy")) + " --image " +
                             q(data("xray_224.png"));

  std::vector<std::vector<std::uint8_t>> first;
  for (const char *run : {"a", "b"}) {
    const auto out = dir / run;
    const int code = run_cli("run" + inputs + " --alpha 15 --out " + q(out), dir / "log.txt");
    c.expect(code == 0, std::string("run ") + run + " exit " + std::to_string(code));
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(out)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    c.expect(files.size() == 5, "expected 4 PNGs and a manifest");
    std::vector<std::vector<std::uint8_t>> bytes;
    for (const auto &f : files) {
      bytes.push_back(read_bytes(f));
      if (f.extension() != ".png") continue;
      try {
        const auto img = load_image(f);
        c.expect(img.width() == 224 && img.height() == 224,
                 f.filename().string() + " is not 224x224");
      } catch (const Error &e) {
        c.expect(false, e.what());
      }
    }
    if (first.empty()) first = std::move(bytes);
    else c.expect(bytes == first, "outputs differ between runs");
  }

  const auto expect_exit = [&](int want, const std::string &what, const std::string &args) {
    const int code = run_cli(args, dir / "log.txt");
    c.expect(code == want, what + ": exit " + std::to_string(code) + ", expected " +
                               std::to_string(want));
  };
  expect_exit(2, "missing input file",
              "run --interest-cam " + q(dir / "nope.npy") + " --other-cam " +
                  q(data("worked_xprime.npy")) + " --image " + q(data("xray_224.png")) +
                  " --out " + q(dir / "x"));
  expect_exit(2, "bad flag", "run --bogus");
  expect_exit(2, "alpha out of range", "run" + inputs + " --alpha -1 --out " + q(dir / "x"));
  expect_exit(2, "unsupported dtype",
              "run --interest-cam " + q(data("bad_dtype_f8.npy")) + " --other-cam " +
                  q(data("worked_xprime.npy")) + " --image " + q(data("xray_224.png")) +
                  " --out " + q(dir / "x"));
  expect_exit(3, "non-positive CAM",
              "run --interest-cam " + q(data("worked_x.npy")) + " --other-cam " +
                  q(data("cam_nonpositive.npy")) + " --image " + q(data("xray_224.png")) +
                  " --out " + q(dir / "x"));
  std::ofstream(dir / "blocker") << "not a directory";
  expect_exit(4, "unwritable output", "run" + inputs + " --out " + q(dir / "blocker" / "out"));
  expect_exit(0, "help", "--help");
}

} // namespace

int main() {
  const std::vector<std::pair<const char *, std::function<void(Check &)>>> criteria = {
      {"worked example (alpha=15) within max(0.5, 1%), < 1 s", worked_example},
      {"kernel identity: K(x,x)=1 for 1000 maps x 4 alphas", kernel_identity},
      {"reciprocity: K(x,x')K(x',x)=1 for 1000 pairs", reciprocity},
      {"positive-scale invariance for c in (0, 100]", scale_invariance},
      {"concentration non-increasing over alpha 1,2,5,15,50", concentration_monotone},
      {"CAM matches naive summation; linearity and homogeneity", cam_oracle},
      {"bilinear: oracle, bounds, constants, identity up to 16x16 -> 224x224", bilinear},
      {"NPY: 1000 bit-exact round trips; malformed input rejected", interchange},
      {"CLI: deterministic 224x224 outputs and exit codes", cli},
  };

  int failed = 0;
  for (const auto &[name, fn] : criteria) {
    Check c;
    try {
      fn(c);
    } catch (const std::exception &e) {
      c.expect(false, std::string("unexpected exception: ") + e.what());
    }
    if (c.failures == 0) {
      std::cout << "PASS  " << name << '\n';
    } else {
      ++failed;
      std::cout << "FAIL  " << name << "  (" << c.failures << " failures: " << c.detail.str()
                << ")\n";
    }
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
