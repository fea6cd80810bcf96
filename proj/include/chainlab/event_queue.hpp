#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "chainlab/errors.hpp"

namespace chainlab {

enum class EventKind : std::uint8_t {
    BlockFound,
    MsgArrival,
    MarketTick,
    AttackPhase,
    ConfirmerAction,
    DifficultyRetarget,
};

const char* event_kind_name(EventKind k);

// Deterministic discrete-event queue. Events fire in (fire_at, seq) order;
// seq is the insertion sequence number, so ties resolve by insertion order
// and never by payload.
class EventQueue {
public:
    using Handle = std::uint64_t;
    using Action = std::function<void()>;

    struct LogEntry {
        double fire_at;
        Handle seq;
        EventKind kind;
    };

    double now() const { return now_; }

    Handle schedule(double fire_at, EventKind kind, Action action) {
        if (fire_at < now_)
            throw PastEventError("schedule: fire_at " + std::to_string(fire_at) +
                                 " is before now " + std::to_string(now_));
        Handle h = next_seq_++;
        heap_.push(Entry{fire_at, h, kind});
        actions_.emplace(h, std::move(action));
        return h;
    }

    void cancel(Handle h) { actions_.erase(h); }

    bool pending(Handle h) const { return actions_.count(h) != 0; }

    std::size_t size() const { return actions_.size(); }

    // Processes every event with fire_at <= t_end, then advances the clock to
    // t_end. Returns the number of events processed.
    std::size_t run_until(double t_end) {
        if (t_end < now_)
            throw PastEventError("run_until: t_end is before now");
        std::size_t processed = 0;
        while (run_one(t_end))
            ++processed;
        now_ = t_end;
        return processed;
    }

    // Processes the single next event if it fires at or before t_end.
    // Returns false (leaving the clock unchanged) when none is due.
    bool run_one(double t_end) {
        while (!heap_.empty() && heap_.top().fire_at <= t_end) {
            Entry e = heap_.top();
            heap_.pop();
            auto it = actions_.find(e.seq);
            if (it == actions_.end())
                continue; // cancelled
            Action action = std::move(it->second);
            actions_.erase(it);
            now_ = e.fire_at;
            if (log_enabled_)
                log_.push_back({e.fire_at, e.seq, e.kind});
            action();
            return true;
        }
        return false;
    }

    // Advances the clock with no event processing (end-of-run bookkeeping).
    void finish_at(double t_end) {
        if (t_end > now_)
            now_ = t_end;
    }

    void enable_log(bool on) { log_enabled_ = on; }
    const std::vector<LogEntry>& log() const { return log_; }

private:
    struct Entry {
        double fire_at;
        Handle seq;
        EventKind kind;
        bool operator>(const Entry& o) const {
            if (fire_at != o.fire_at)
                return fire_at > o.fire_at;
            return seq > o.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap_;
    std::unordered_map<Handle, Action> actions_;
    std::vector<LogEntry> log_;
    double now_ = 0.0;
    Handle next_seq_ = 0;
    bool log_enabled_ = false;
};

} // namespace chainlab
