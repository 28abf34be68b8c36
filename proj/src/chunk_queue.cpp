#include "rapid/chunk_queue.hpp"

#include "rapid/types.hpp"

namespace rapid {

void ActionChunk::validate() const {
    if (horizon == 0) throw ConfigError("ActionChunk: horizon must be >= 1");
    if (joints == 0) throw ConfigError("ActionChunk: joints must be >= 1");
    if (actions.size() != horizon * joints) throw ConfigError("ActionChunk: actions size mismatch");
    if (!logits.empty() && logits.size() != horizon * bins)
        throw ConfigError("ActionChunk: logits size mismatch");
    if (!all_finite(actions) || !all_finite(logits))
        throw ConfigError("ActionChunk: non-finite values");
}

void ActionQueue::refill(const ActionChunk& chunk) {
    chunk.validate();
    if (chunk.joints != joints_) throw ConfigError("ActionQueue: chunk joint count mismatch");
    discard_pending();
    for (std::size_t r = 0; r < chunk.horizon; ++r) {
        Row row;
        row.action.assign(chunk.actions.begin() + static_cast<std::ptrdiff_t>(r * chunk.joints),
                          chunk.actions.begin() + static_cast<std::ptrdiff_t>((r + 1) * chunk.joints));
        if (chunk.bins > 0 && !chunk.logits.empty())
            row.logits.assign(chunk.logits.begin() + static_cast<std::ptrdiff_t>(r * chunk.bins),
                              chunk.logits.begin() + static_cast<std::ptrdiff_t>((r + 1) * chunk.bins));
        row.seq = chunk.sequence;
        row.index = r;
        rows_.push_back(std::move(row));
    }
    enqueued_ += chunk.horizon;
    in_flight_ = false;
}

std::size_t ActionQueue::discard_pending() {
    const std::size_t n = rows_.size();
    rows_.clear();
    discarded_ += n;
    return n;
}

PopResult ActionQueue::pop() {
    PopResult r;
    if (!rows_.empty()) {
        Row row = std::move(rows_.front());
        rows_.pop_front();
        r.outcome = PopOutcome::action;
        r.action = std::move(row.action);
        r.logits = std::move(row.logits);
        r.chunk_seq = row.seq;
        r.row_index = row.index;
        held_ = r.action;
        ++executed_;
        return r;
    }
    if (in_flight_) {
        r.outcome = PopOutcome::stall;
        r.action = stall_policy_ == StallPolicy::hold_last ? held_
                                                           : std::vector<double>(joints_, 0.0);
        ++stalls_;
        return r;
    }
    r.outcome = PopOutcome::empty;
    return r;
}

}  // namespace rapid
