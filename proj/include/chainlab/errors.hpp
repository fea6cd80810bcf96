#pragma once

#include <stdexcept>
#include <string>

namespace chainlab {

// Base class for all precondition / domain errors raised by the simulator.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PastEventError : SimError {
    using SimError::SimError;
};
struct NonPositiveRateError : SimError {
    using SimError::SimError;
};
struct MeanBelowMedianError : SimError {
    using SimError::SimError;
};
struct InvalidRewardError : SimError {
    using SimError::SimError;
};
struct IntraChainDoubleSpendError : SimError {
    using SimError::SimError;
};
struct ThresholdAboveDifficultyError : SimError {
    using SimError::SimError;
};
struct DivergentSeriesError : SimError {
    using SimError::SimError;
};
struct InsufficientRentableHashError : SimError {
    using SimError::SimError;
};
struct BudgetExhaustedError : SimError {
    using SimError::SimError;
};
struct AlreadyConfirmedError : SimError {
    using SimError::SimError;
};
struct OutOfRangeError : SimError {
    using SimError::SimError;
};
struct NoEvidenceError : SimError {
    using SimError::SimError;
};
struct ParseError : SimError {
    using SimError::SimError;
};
struct UnknownPresetError : SimError {
    using SimError::SimError;
};
struct DanglingReferenceError : SimError {
    using SimError::SimError;
};

} // namespace chainlab
