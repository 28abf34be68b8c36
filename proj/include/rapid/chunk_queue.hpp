#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "rapid/errors.hpp"

namespace rapid {

enum class ChunkSource { edge, cloud };

// One model inference: k action rows executed open-loop, newest first in
// time, plus optional per-row categorical logits for confidence probes.
struct ActionChunk {
    std::uint64_t sequence = 0;     // wire sequence of the producing request
    std::uint64_t origin_step = 0;  // control tick the observation was captured at
    std::size_t horizon = 0;        // k
    std::size_t joints = 0;         // N
    std::size_t bins = 0;           // B, 0 when no logits travel with the chunk
    ChunkSource source = ChunkSource::cloud;
    std::vector<double> actions;  // horizon x joints, row-major
    std::vector<double> logits;   // horizon x bins, row-major, possibly empty

    void validate() const;
};

enum class StallPolicy { hold_last, zero_hold };

enum class PopOutcome {
    action,  // a row was consumed
    stall,   // queue empty, refill in flight: held command repeated
    empty,   // queue empty, nothing in flight: caller must dispatch first
};

struct PopResult {
    PopOutcome outcome = PopOutcome::empty;
    std::vector<double> action;  // executed command (held command on stall)
    std::vector<double> logits;  // row logits, empty unless outcome == action with bins > 0
    std::uint64_t chunk_seq = 0;  // provenance, valid when outcome == action
    std::size_t row_index = 0;
};

// FIFO over the rows of the most recent chunk. Rows execute in order, each
// at most once; a refill discards whatever is pending (stale open-loop tail)
// and replaces it wholesale. Counter invariant, checked in tests:
//   enqueued == executed + discarded + pending
class ActionQueue {
  public:
    ActionQueue(std::size_t joints, StallPolicy stall = StallPolicy::hold_last)
        : joints_(joints), stall_policy_(stall), held_(joints, 0.0) {
        if (joints == 0) throw ConfigError("ActionQueue: need at least one joint");
    }

    // Preempt-and-refill: drop pending rows, install the chunk, clear in_flight.
    void refill(const ActionChunk& chunk);

    // Halt open-loop execution: drop pending rows without installing anything.
    // Returns the number of rows discarded.
    std::size_t discard_pending();

    PopResult pop();

    bool empty() const { return rows_.empty(); }
    std::size_t pending() const { return rows_.size(); }

    bool in_flight() const { return in_flight_; }
    void set_in_flight() { in_flight_ = true; }
    void clear_in_flight() { in_flight_ = false; }

    std::uint64_t enqueued() const { return enqueued_; }
    std::uint64_t executed() const { return executed_; }
    std::uint64_t discarded() const { return discarded_; }
    std::uint64_t stalls() const { return stalls_; }

  private:
    struct Row {
        std::vector<double> action;
        std::vector<double> logits;
        std::uint64_t seq = 0;
        std::size_t index = 0;
    };

    std::size_t joints_;
    StallPolicy stall_policy_;
    std::deque<Row> rows_;
    std::vector<double> held_;
    bool in_flight_ = false;
    std::uint64_t enqueued_ = 0;
    std::uint64_t executed_ = 0;
    std::uint64_t discarded_ = 0;
    std::uint64_t stalls_ = 0;
};

}  // namespace rapid
