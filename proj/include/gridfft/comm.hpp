#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gridfft/distribution.hpp"

namespace gridfft {

using ComplexVec = std::vector<cplx>;

struct CollectiveEvent {
  std::string kind;        // all_to_all | gather | scatter | barrier
  std::string comm;        // "world" or "g<mode>#<group>"
  int comm_size = 0;
  std::size_t sent_bytes = 0;
  std::size_t recv_bytes = 0;
  std::string stage;       // label set by the caller, may be empty

  bool operator==(const CollectiveEvent&) const = default;
};

/// Ordered record of the collectives one rank entered.
using EventLog = std::vector<CollectiveEvent>;

/// One JSON object per (rank, event), rank-major; deterministic for a
/// deterministic program.
std::string trace_jsonl(std::span<const EventLog> per_rank_logs);

std::size_t count_collectives(const EventLog& log, std::string_view kind = "all_to_all");

enum class ScheduleMode {
  Concurrent,  // one OS thread per rank, free running between collectives
  Serial,      // same threads, but execution passes rank to rank at collective
               // boundaries; results are bit-identical to Concurrent
};

struct SpawnOptions {
  ScheduleMode mode = ScheduleMode::Concurrent;
  std::chrono::milliseconds collective_timeout{10000};
};

namespace detail {
class Runtime;
struct Group;
struct Pending;
}  // namespace detail

class RankContext;

/// Handle to one rendezvous domain (the world or one grid-mode slice).
/// Every member of a communicator must call the same sequence of collective
/// kinds; a mismatch fails the run with ProgramError. All collectives are
/// synchronous: they return only once every member has entered.
class Communicator {
 public:
  int size() const;
  int rank() const { return pos_; }
  const std::string& label() const;

  /// send must hold exactly size() buffers, one per destination; the result
  /// holds one buffer per source, ordered by source rank.
  std::vector<ComplexVec> all_to_all(std::vector<ComplexVec> send);

  /// Rank-ordered concatenation on root; everyone else gets an empty buffer.
  ComplexVec gather(ComplexVec send, int root);

  /// bufs is consulted on root only and must hold size() buffers there.
  ComplexVec scatter(std::vector<ComplexVec> bufs, int root);

  void barrier();

 private:
  friend class RankContext;
  Communicator(detail::Runtime* rt, detail::Group* group, int pos, RankContext* ctx)
      : rt_(rt), group_(group), pos_(pos), ctx_(ctx) {}

  detail::Runtime* rt_;
  detail::Group* group_;
  int pos_;
  RankContext* ctx_;
};

/// Per-rank execution environment handed to a rank program.
class RankContext {
 public:
  int rank() const { return rank_; }
  const Grid& grid() const;

  Communicator& world();

  /// Sub-communicator of the ranks sharing every grid coordinate except
  /// `grid_mode`; member order follows that coordinate.
  Communicator& split(int grid_mode);

  /// Label recorded on subsequent collective events.
  void set_stage(std::string label) { stage_ = std::move(label); }
  const std::string& stage() const { return stage_; }

  const EventLog& log() const { return log_; }

  RankContext(const RankContext&) = delete;
  RankContext& operator=(const RankContext&) = delete;

 private:
  friend class Communicator;
  friend class detail::Runtime;
  RankContext(detail::Runtime* rt, int rank) : rt_(rt), rank_(rank) {}

  detail::Runtime* rt_;
  int rank_;
  std::optional<Communicator> world_;
  std::vector<std::optional<Communicator>> splits_;
  EventLog log_;
  std::string stage_;
};

namespace detail {
/// Runs one worker per grid rank to completion; collectives are the only
/// cross-worker channels. Rethrows the first rank failure (preferring root
/// causes over secondary DeadlockDetected victims).
void run_ranks(const Grid& grid, const std::function<void(RankContext&)>& body,
               const SpawnOptions& opts, std::vector<EventLog>* logs_out);
}  // namespace detail

template <typename R>
struct SpawnReport {
  std::vector<R> results;        // ordered by rank
  std::vector<EventLog> logs;    // ordered by rank
};

template <typename R>
SpawnReport<R> spawn_traced(const Grid& grid, const std::function<R(RankContext&)>& program,
                            const SpawnOptions& opts = {}) {
  std::vector<std::optional<R>> slots(static_cast<std::size_t>(grid.size()));
  SpawnReport<R> report;
  detail::run_ranks(
      grid,
      [&](RankContext& ctx) { slots[static_cast<std::size_t>(ctx.rank())] = program(ctx); },
      opts, &report.logs);
  report.results.reserve(slots.size());
  for (auto& slot : slots) report.results.push_back(std::move(*slot));
  return report;
}

/// Run a deterministic program on every rank of the grid; results ordered by
/// rank. Collectives act as synchronization points.
template <typename R>
std::vector<R> spawn(const Grid& grid, const std::function<R(RankContext&)>& program,
                     const SpawnOptions& opts = {}) {
  return spawn_traced<R>(grid, program, opts).results;
}

}  // namespace gridfft
