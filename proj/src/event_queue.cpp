#include "chainlab/event_queue.hpp"

namespace chainlab {

const char* event_kind_name(EventKind k) {
    switch (k) {
    case EventKind::BlockFound: return "BlockFound";
    case EventKind::MsgArrival: return "MsgArrival";
    case EventKind::MarketTick: return "MarketTick";
    case EventKind::AttackPhase: return "AttackPhase";
    case EventKind::ConfirmerAction: return "ConfirmerAction";
    case EventKind::DifficultyRetarget: return "DifficultyRetarget";
    }
    return "?";
}

} // namespace chainlab
