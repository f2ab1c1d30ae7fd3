#pragma once
// Ingestion -> alignment -> aggregation -> diagnosis for whole bits, and a
// small bounded worker pool for processing many bits.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "bitforensics/aggregation.hpp"
#include "bitforensics/alignment.hpp"
#include "bitforensics/core_model.hpp"
#include "bitforensics/rrfci.hpp"

namespace bitforensics {

enum class ProfileSource : std::uint8_t { Detections, GroundTruth };

/// Aligns the chosen streams of a bit and tallies them into a profile.
BitDamageProfile profile_bit(const BitDetections& bit, const AlignmentConfig& align_cfg = {},
                             ProfileSource source = ProfileSource::Detections);

struct BitDiagnosis {
  BitDamageProfile profile;
  CauseSet result;
};

BitDiagnosis diagnose_bit(const BitDetections& bit, const AlignmentConfig& align_cfg = {},
                          const RuleConfig& rule_cfg = {});

/// Hardware concurrency, capped by BITFORENSICS_THREADS when that is set to a
/// positive integer.
std::size_t worker_count();

/// Computes fn(i) for i in [0, n) on at most `workers` threads and returns the
/// results in index order. The first exception thrown by any task is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn, std::size_t workers = worker_count()) {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, n));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace bitforensics
