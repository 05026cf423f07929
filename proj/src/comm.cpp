#include "gridfft/comm.hpp"

#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

namespace gridfft {

namespace detail {

struct Pending {
  std::string kind;
  int expected = 0;
  int arrived = 0;
  int root = -1;
  bool complete = false;
  bool failed = false;
  Errc err = Errc::ProgramError;
  std::string err_msg;
  std::vector<std::vector<ComplexVec>> matrix;  // all_to_all: [member] -> per-destination
  std::vector<ComplexVec> slots;                // gather deposits / scatter payload
  std::vector<int> waiters;                     // world ranks parked on this collective
};

struct Group {
  std::string label;
  std::vector<int> members;  // world ranks, in group order
  std::shared_ptr<Pending> pending;
};

enum class RankState { Ready, Running, Waiting, Done };

class Runtime {
 public:
  Runtime(Grid grid, SpawnOptions opts) : grid_(std::move(grid)), opts_(opts) {
    const int ranks = grid_.size();
    state_.assign(static_cast<std::size_t>(ranks), RankState::Ready);

    world_.label = "world";
    world_.members.resize(static_cast<std::size_t>(ranks));
    for (int r = 0; r < ranks; ++r) world_.members[static_cast<std::size_t>(r)] = r;

    mode_groups_.resize(static_cast<std::size_t>(grid_.order()));
    group_of_.assign(static_cast<std::size_t>(grid_.order()),
                     std::vector<int>(static_cast<std::size_t>(ranks), -1));
    for (int mode = 0; mode < grid_.order(); ++mode) build_mode_groups(mode);
  }

  const Grid& grid() const { return grid_; }

  Group& world_group() { return world_; }

  Group& split_group(int mode, int rank) {
    if (mode < 0 || mode >= grid_.order()) {
      fail(Errc::InvalidMode, "grid mode " + std::to_string(mode) + " of " + grid_.shape().str());
    }
    const int id = group_of_[static_cast<std::size_t>(mode)][static_cast<std::size_t>(rank)];
    return mode_groups_[static_cast<std::size_t>(mode)][static_cast<std::size_t>(id)];
  }

  void execute(const std::function<void(RankContext&)>& body, std::vector<EventLog>* logs_out) {
    const int ranks = grid_.size();
    contexts_.clear();
    contexts_.reserve(static_cast<std::size_t>(ranks));
    for (int r = 0; r < ranks; ++r) {
      contexts_.emplace_back(new RankContext(this, r));
      contexts_.back()->splits_.resize(static_cast<std::size_t>(grid_.order()));
    }
    errors_.assign(static_cast<std::size_t>(ranks), nullptr);
    error_codes_.assign(static_cast<std::size_t>(ranks), std::nullopt);

    if (opts_.mode == ScheduleMode::Serial) state_[0] = RankState::Running;

    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(ranks));
    for (int r = 0; r < ranks; ++r) {
      workers.emplace_back([this, r, &body] { worker_main(r, body); });
    }
    for (auto& t : workers) t.join();

    if (logs_out) {
      logs_out->clear();
      for (auto& ctx : contexts_) logs_out->push_back(ctx->log_);
    }

    // Prefer a root cause over secondary deadlock reports.
    std::size_t pick = errors_.size();
    for (std::size_t r = 0; r < errors_.size(); ++r) {
      if (!errors_[r]) continue;
      if (error_codes_[r] != Errc::DeadlockDetected) {
        pick = r;
        break;
      }
      if (pick == errors_.size()) pick = r;
    }
    if (pick < errors_.size()) std::rethrow_exception(errors_[pick]);
  }

  // --- collective engine -----------------------------------------------

  std::shared_ptr<Pending> rendezvous(Group& group, int pos, const std::string& kind, int root,
                                      const std::function<void(Pending&)>& deposit) {
    const int me = group.members[static_cast<std::size_t>(pos)];
    std::unique_lock<std::mutex> lock(mu_);

    if (!group.pending) {
      auto p = std::make_shared<Pending>();
      p->kind = kind;
      p->expected = static_cast<int>(group.members.size());
      p->root = root;
      p->matrix.resize(group.members.size());
      p->slots.resize(group.members.size());
      group.pending = p;
    }
    auto p = group.pending;
    if (p->kind != kind || p->root != root) {
      p->failed = true;
      p->err = Errc::ProgramError;
      p->err_msg = "mismatched collectives on " + group.label + ": " + p->kind + " vs " + kind;
      group.pending.reset();
      release_waiters(*p);
      cv_.notify_all();
      throw Error(p->err, p->err_msg);
    }

    // A member that already returned from its program can never arrive.
    for (int member : group.members) {
      if (state_[static_cast<std::size_t>(member)] == RankState::Done) {
        p->failed = true;
        p->err = Errc::DeadlockDetected;
        p->err_msg = "rank " + std::to_string(member) + " exited before " + kind + " on " + group.label;
        group.pending.reset();
        release_waiters(*p);
        cv_.notify_all();
        throw Error(p->err, p->err_msg);
      }
    }

    deposit(*p);
    p->arrived++;

    if (p->arrived == p->expected) {
      p->complete = true;
      group.pending.reset();
      release_waiters(*p);
      cv_.notify_all();
      return p;
    }

    if (opts_.mode == ScheduleMode::Serial) {
      state_[static_cast<std::size_t>(me)] = RankState::Waiting;
      p->waiters.push_back(me);
      advance_from(me);
    }

    const auto deadline = std::chrono::steady_clock::now() + opts_.collective_timeout;
    const bool serial = opts_.mode == ScheduleMode::Serial;
    while (true) {
      const bool settled = p->complete || p->failed;
      if (settled && (!serial || state_[static_cast<std::size_t>(me)] == RankState::Running)) {
        break;
      }
      if (settled) {
        // Only the serial turn is outstanding; no timeout applies to it.
        cv_.wait(lock);
        continue;
      }
      if (cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
        if (!p->complete && !p->failed) {
          p->failed = true;
          p->err = Errc::DeadlockDetected;
          p->err_msg = kind + " on " + group.label + " timed out with " + std::to_string(p->arrived) +
                       " of " + std::to_string(p->expected) + " ranks";
          if (group.pending == p) group.pending.reset();
          release_waiters(*p);
          cv_.notify_all();
        }
      }
    }
    if (p->failed) throw Error(p->err, p->err_msg);
    return p;
  }

  void finish(int rank) {
    std::unique_lock<std::mutex> lock(mu_);
    state_[static_cast<std::size_t>(rank)] = RankState::Done;
    fail_pendings_with_member(rank);
    if (opts_.mode == ScheduleMode::Serial) advance_from(rank);
    cv_.notify_all();
  }

  void wait_first_turn(int rank) {
    if (opts_.mode != ScheduleMode::Serial) return;
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return state_[static_cast<std::size_t>(rank)] == RankState::Running; });
  }

  void record_error(int rank, std::exception_ptr e, std::optional<Errc> code) {
    std::lock_guard<std::mutex> lock(mu_);
    errors_[static_cast<std::size_t>(rank)] = std::move(e);
    error_codes_[static_cast<std::size_t>(rank)] = code;
  }

  RankContext& context(int rank) { return *contexts_[static_cast<std::size_t>(rank)]; }

 private:
  void worker_main(int rank, const std::function<void(RankContext&)>& body) {
    wait_first_turn(rank);
    try {
      body(*contexts_[static_cast<std::size_t>(rank)]);
    } catch (const Error& e) {
      record_error(rank, std::current_exception(), e.code());
    } catch (...) {
      record_error(rank, std::current_exception(), std::nullopt);
    }
    finish(rank);
  }

  void build_mode_groups(int mode) {
    const int ranks = grid_.size();
    // Partition world ranks by their coordinates with `mode` removed; member
    // order within a partition follows the mode coordinate.
    std::vector<std::vector<int>> buckets;
    std::vector<std::int64_t> bucket_key;
    for (int r = 0; r < ranks; ++r) {
      auto coords = grid_.coords(r);
      std::int64_t key = 0;
      std::int64_t scale = 1;
      for (int m = 0; m < grid_.order(); ++m) {
        if (m == mode) continue;
        key += coords[static_cast<std::size_t>(m)] * scale;
        scale *= grid_.shape()[m];
      }
      std::size_t id = 0;
      for (; id < bucket_key.size(); ++id) {
        if (bucket_key[id] == key) break;
      }
      if (id == bucket_key.size()) {
        bucket_key.push_back(key);
        buckets.emplace_back();
      }
      buckets[id].push_back(r);  // world rank order == ascending mode coordinate within a bucket
      group_of_[static_cast<std::size_t>(mode)][static_cast<std::size_t>(r)] = static_cast<int>(id);
    }
    auto& groups = mode_groups_[static_cast<std::size_t>(mode)];
    groups.resize(buckets.size());
    for (std::size_t id = 0; id < buckets.size(); ++id) {
      groups[id].label = "g" + std::to_string(mode) + "#" + std::to_string(id);
      groups[id].members = std::move(buckets[id]);
    }
  }

  // All state transitions below run under mu_.

  void release_waiters(Pending& p) {
    for (int w : p.waiters) {
      if (state_[static_cast<std::size_t>(w)] == RankState::Waiting) {
        state_[static_cast<std::size_t>(w)] = RankState::Ready;
      }
    }
    p.waiters.clear();
  }

  void fail_pending(Pending& p, Errc err, const std::string& msg) {
    if (p.complete || p.failed) return;
    p.failed = true;
    p.err = err;
    p.err_msg = msg;
    release_waiters(p);
  }

  void for_each_group(const std::function<void(Group&)>& fn) {
    fn(world_);
    for (auto& per_mode : mode_groups_) {
      for (auto& g : per_mode) fn(g);
    }
  }

  void fail_pendings_with_member(int rank) {
    for_each_group([&](Group& g) {
      if (!g.pending) return;
      bool member = false;
      for (int m : g.members) member = member || (m == rank);
      if (!member) return;
      auto p = g.pending;
      fail_pending(*p, Errc::DeadlockDetected,
                   "rank " + std::to_string(rank) + " exited while " + p->kind + " on " + g.label +
                       " was waiting for " + std::to_string(p->expected - p->arrived) + " ranks");
      g.pending.reset();
    });
  }

  void advance_from(int rank) {
    const int ranks = grid_.size();
    for (int attempt = 0; attempt < 2; ++attempt) {
      for (int step = 1; step <= ranks; ++step) {
        const int r = (rank + step) % ranks;
        if (state_[static_cast<std::size_t>(r)] == RankState::Ready) {
          state_[static_cast<std::size_t>(r)] = RankState::Running;
          cv_.notify_all();
          return;
        }
      }
      bool all_done = true;
      for (auto s : state_) all_done = all_done && (s == RankState::Done);
      if (all_done) return;
      // Nobody can run and somebody is parked: every open collective is stuck.
      bool failed_any = false;
      for_each_group([&](Group& g) {
        if (!g.pending) return;
        auto p = g.pending;
        fail_pending(*p, Errc::DeadlockDetected,
                     p->kind + " on " + g.label + " entered by " + std::to_string(p->arrived) + " of " +
                         std::to_string(p->expected) + " ranks");
        g.pending.reset();
        failed_any = true;
      });
      if (!failed_any) return;  // parked ranks already hold failed collectives
    }
  }

  Grid grid_;
  SpawnOptions opts_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<RankState> state_;
  Group world_;
  std::vector<std::vector<Group>> mode_groups_;  // mode -> groups
  std::vector<std::vector<int>> group_of_;       // mode -> rank -> group id
  std::vector<std::unique_ptr<RankContext>> contexts_;
  std::vector<std::exception_ptr> errors_;
  std::vector<std::optional<Errc>> error_codes_;
};

void run_ranks(const Grid& grid, const std::function<void(RankContext&)>& body,
               const SpawnOptions& opts, std::vector<EventLog>* logs_out) {
  if (grid.size() < 1) fail(Errc::InvalidParams, "grid with no ranks");
  Runtime rt(grid, opts);
  rt.execute(body, logs_out);
}

}  // namespace detail

// --- Communicator ---------------------------------------------------------

namespace {
constexpr std::size_t kElementBytes = sizeof(cplx);

std::size_t total_bytes(const std::vector<ComplexVec>& bufs) {
  std::size_t n = 0;
  for (const auto& b : bufs) n += b.size();
  return n * kElementBytes;
}
}  // namespace

int Communicator::size() const { return static_cast<int>(group_->members.size()); }

const std::string& Communicator::label() const { return group_->label; }

std::vector<ComplexVec> Communicator::all_to_all(std::vector<ComplexVec> send) {
  if (static_cast<int>(send.size()) != size()) {
    fail(Errc::SizeMismatch, "all_to_all needs " + std::to_string(size()) + " buffers, got " +
                                 std::to_string(send.size()));
  }
  const std::size_t sent = total_bytes(send);
  auto done = rt_->rendezvous(*group_, pos_, "all_to_all", -1, [&](detail::Pending& p) {
    p.matrix[static_cast<std::size_t>(pos_)] = std::move(send);
  });
  std::vector<ComplexVec> recv(static_cast<std::size_t>(size()));
  for (int s = 0; s < size(); ++s) {
    recv[static_cast<std::size_t>(s)] =
        std::move(done->matrix[static_cast<std::size_t>(s)][static_cast<std::size_t>(pos_)]);
  }
  ctx_->log_.push_back({"all_to_all", label(), size(), sent, total_bytes(recv), ctx_->stage_});
  return recv;
}

ComplexVec Communicator::gather(ComplexVec send, int root) {
  if (root < 0 || root >= size()) {
    fail(Errc::InvalidRoot, "root " + std::to_string(root) + " on " + label());
  }
  const std::size_t sent = send.size() * kElementBytes;
  auto done = rt_->rendezvous(*group_, pos_, "gather", root, [&](detail::Pending& p) {
    p.slots[static_cast<std::size_t>(pos_)] = std::move(send);
  });
  ComplexVec out;
  if (pos_ == root) {
    std::size_t total = 0;
    for (const auto& b : done->slots) total += b.size();
    out.reserve(total);
    for (auto& b : done->slots) out.insert(out.end(), b.begin(), b.end());
  }
  ctx_->log_.push_back({"gather", label(), size(), sent, out.size() * kElementBytes, ctx_->stage_});
  return out;
}

ComplexVec Communicator::scatter(std::vector<ComplexVec> bufs, int root) {
  if (root < 0 || root >= size()) {
    fail(Errc::InvalidRoot, "root " + std::to_string(root) + " on " + label());
  }
  std::size_t sent = 0;
  if (pos_ == root) {
    if (static_cast<int>(bufs.size()) != size()) {
      fail(Errc::SizeMismatch, "scatter needs " + std::to_string(size()) + " buffers, got " +
                                   std::to_string(bufs.size()));
    }
    sent = total_bytes(bufs);
  }
  auto done = rt_->rendezvous(*group_, pos_, "scatter", root, [&](detail::Pending& p) {
    if (pos_ == root) p.slots = std::move(bufs);
  });
  ComplexVec out = std::move(done->slots[static_cast<std::size_t>(pos_)]);
  ctx_->log_.push_back({"scatter", label(), size(), sent, out.size() * kElementBytes, ctx_->stage_});
  return out;
}

void Communicator::barrier() {
  rt_->rendezvous(*group_, pos_, "barrier", -1, [](detail::Pending&) {});
  ctx_->log_.push_back({"barrier", label(), size(), 0, 0, ctx_->stage_});
}

// --- RankContext ------------------------------------------------------------

const Grid& RankContext::grid() const { return rt_->grid(); }

Communicator& RankContext::world() {
  if (!world_) {
    // World members are 0..p-1, so a rank's position is the rank itself.
    world_.emplace(Communicator(rt_, &rt_->world_group(), rank_, this));
  }
  return *world_;
}

Communicator& RankContext::split(int grid_mode) {
  if (grid_mode < 0 || grid_mode >= grid().order()) {
    fail(Errc::InvalidMode, "grid mode " + std::to_string(grid_mode) + " of " + grid().shape().str());
  }
  auto& slot = splits_[static_cast<std::size_t>(grid_mode)];
  if (!slot) {
    auto& g = rt_->split_group(grid_mode, rank_);
    int pos = 0;
    for (std::size_t i = 0; i < g.members.size(); ++i) {
      if (g.members[i] == rank_) pos = static_cast<int>(i);
    }
    slot.emplace(Communicator(rt_, &g, pos, this));
  }
  return *slot;
}

// --- trace ------------------------------------------------------------------

std::string trace_jsonl(std::span<const EventLog> per_rank_logs) {
  std::string out;
  for (std::size_t rank = 0; rank < per_rank_logs.size(); ++rank) {
    for (std::size_t seq = 0; seq < per_rank_logs[rank].size(); ++seq) {
      const auto& e = per_rank_logs[rank][seq];
      nlohmann::json record{
          {"rank", rank},          {"seq", seq},
          {"kind", e.kind},        {"comm", e.comm},
          {"comm_size", e.comm_size}, {"sent_bytes", e.sent_bytes},
          {"recv_bytes", e.recv_bytes}, {"stage", e.stage},
      };
      out += record.dump();
      out += '\n';
    }
  }
  return out;
}

std::size_t count_collectives(const EventLog& log, std::string_view kind) {
  std::size_t n = 0;
  for (const auto& e : log) {
    if (e.kind == kind) ++n;
  }
  return n;
}

}  // namespace gridfft
