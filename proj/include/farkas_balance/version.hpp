#pragma once

namespace farkas_balance {

inline constexpr const char* kSolverVersion = "farkas-balance 0.1.0";

}  // namespace farkas_balance
