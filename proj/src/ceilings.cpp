#include <algorithm>
#include <chrono>
#include <cstring>
#include <stdexcept>
#include <vector>

#include <omp.h>

#include "kernels.hpp"
#include "rpbf/metrics.hpp"
#include "rpbf/quantpack.hpp"

namespace rpbf {

namespace {

using Clock = std::chrono::steady_clock;

inline void compiler_barrier() { asm volatile("" ::: "memory"); }
inline void escape(const void* p) { asm volatile("" : : "g"(p) : "memory"); }

// Every thread builds its own body with `make_body` (private buffers) and runs
// it until min_seconds elapse. The rate is the total work over the slowest
// thread's time, best of `trials`.
template <typename MakeBody>
double best_rate(const CeilingOptions& opt, MakeBody&& make_body) {
  double best = 0.0;
  for (int t = 0; t < opt.trials; ++t) {
    double total_ops = 0.0;
    double slowest = 0.0;
#pragma omp parallel reduction(+ : total_ops) reduction(max : slowest)
    {
      auto body = make_body();
#pragma omp barrier
      double ops = 0.0;
      const auto start = Clock::now();
      double elapsed = 0.0;
      do {
        ops += body();
        elapsed = std::chrono::duration<double>(Clock::now() - start).count();
      } while (elapsed < opt.min_seconds);
      total_ops += ops;
      slowest = std::max(slowest, elapsed);
    }
    best = std::max(best, total_ops / slowest);
  }
  return best;
}

double register_fma_peak(const CeilingOptions& opt) {
  using detail::v16sf;
  constexpr int kChains = 12;
  constexpr int kSteps = 4096;
  return best_rate(opt, [] {
    return [acc = std::vector<v16sf>(kChains)]() mutable {
      volatile float xs = 0.9999f, ys = 1e-7f;
      const v16sf x = v16sf{} + xs;
      const v16sf y = v16sf{} + ys;
      v16sf r[kChains];
      for (int j = 0; j < kChains; ++j) r[j] = acc[j];
      for (int s = 0; s < kSteps; ++s) {
        for (int j = 0; j < kChains; ++j) r[j] = r[j] * x + y;
      }
      for (int j = 0; j < kChains; ++j) acc[j] = r[j];
      compiler_barrier();
      // one FMA per lane, two ops each
      return 2.0 * 16.0 * kChains * kSteps;
    };
  });
}

double half_kernel_peak(const CeilingOptions& opt) {
  constexpr std::size_t MR = kHalfMicroRows, NR = kHalfMicroCols;
  CeilingOptions short_opt = opt;
  short_opt.trials = std::max(1, opt.trials / 2);
  double best = 0.0;
  for (std::size_t kc : {64u, 128u, 256u, 512u, 1024u}) {
    best = std::max(best, best_rate(short_opt, [kc] {
      struct Buffers {
        std::vector<float> ar, ai, br, bi, nbi, cr, ci;
      };
      Buffers b{std::vector<float>(MR * kc, 1e-3f), std::vector<float>(MR * kc, -1e-3f),
                std::vector<float>(kc * NR, 2e-3f),  std::vector<float>(kc * NR, 1e-3f),
                std::vector<float>(kc * NR, -1e-3f), std::vector<float>(MR * NR, 0.0f),
                std::vector<float>(MR * NR, 0.0f)};
      return [b = std::move(b), kc]() mutable {
        escape(b.cr.data());
        escape(b.ci.data());
        for (int rep = 0; rep < 64; ++rep) {
          detail::half_micro_kernel(b.ar.data(), b.ai.data(), kc, b.br.data(), b.bi.data(), b.nbi.data(), NR, kc,
                                    b.cr.data(), b.ci.data(), NR);
          compiler_barrier();
        }
        return 64.0 * 8.0 * MR * NR * static_cast<double>(kc);
      };
    }));
  }
  return best;
}

double onebit_kernel_peak(const CeilingOptions& opt) {
  CeilingOptions short_opt = opt;
  short_opt.trials = std::max(1, opt.trials / 2);
  double best = 0.0;
  for (std::size_t bits : {256u, 1024u, 4096u, 16384u}) {
    best = std::max(best, best_rate(short_opt, [bits] {
      const std::size_t words = bits / kWordBits;
      std::vector<std::uint32_t> w(8 * words);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0x9e3779b9u * static_cast<std::uint32_t>(i + 1);
      return [w = std::move(w), words, bits]() mutable {
        const std::uint32_t* ar = w.data();
        const std::uint32_t* ai = ar + 2 * words;
        const std::uint32_t* br = ai + 2 * words;
        const std::uint32_t* bi = br + 2 * words;
        detail::BitCounts out[4]{};
        escape(out);
        for (int rep = 0; rep < 64; ++rep) {
          detail::bit_micro_kernel<false>(ar, ai, br, bi, words, words, out, 2);
          compiler_barrier();
        }
        escape(out);
        // 2 x 2 outputs, 8 useful ops per complex term
        return 64.0 * 8.0 * 4.0 * static_cast<double>(bits);
      };
    }));
  }
  return best;
}

// Parallel copy: each thread streams its own slice of one large buffer.
double stream_bandwidth(const CeilingOptions& opt) {
  std::vector<unsigned char> src(opt.stream_bytes), dst(opt.stream_bytes);
  const std::size_t n = src.size();
#pragma omp parallel
  {
    const std::size_t threads = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t id = static_cast<std::size_t>(omp_get_thread_num());
    const std::size_t lo = n * id / threads, hi = n * (id + 1) / threads;
    std::memset(src.data() + lo, 1, hi - lo);
    std::memset(dst.data() + lo, 0, hi - lo);
  }
  double best = 0.0;
  for (int t = 0; t < opt.trials; ++t) {
    const auto start = Clock::now();
#pragma omp parallel
    {
      const std::size_t threads = static_cast<std::size_t>(omp_get_num_threads());
      const std::size_t id = static_cast<std::size_t>(omp_get_thread_num());
      const std::size_t lo = n * id / threads, hi = n * (id + 1) / threads;
      std::memcpy(dst.data() + lo, src.data() + lo, hi - lo);
    }
    compiler_barrier();
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    // read + write
    best = std::max(best, 2.0 * static_cast<double>(n) / elapsed);
    src[static_cast<std::size_t>(t) % n] = static_cast<unsigned char>(dst[(static_cast<std::size_t>(t) * 7919) % n] + 1);
  }
  return best;
}

}  // namespace

MachineCeiling measure_ceilings(const CeilingOptions& options) {
  if (options.trials < 1 || options.min_seconds <= 0.0) throw std::invalid_argument("measure_ceilings: bad options");
  MachineCeiling c;
  c.peak_compute_half = std::max(register_fma_peak(options), half_kernel_peak(options));
  c.peak_compute_onebit = onebit_kernel_peak(options);
  c.peak_bandwidth = stream_bandwidth(options);
  if (!(c.peak_compute_half > 0.0) || !(c.peak_compute_onebit > 0.0) || !(c.peak_bandwidth > 0.0)) {
    throw std::runtime_error("measure_ceilings: timer produced a non-positive rate");
  }
  return c;
}

}  // namespace rpbf
