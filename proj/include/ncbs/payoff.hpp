#pragma once

#include <algorithm>
#include <optional>
#include <string_view>

namespace ncbs {

enum class PayoffKind { Call, Put };

struct Payoff {
    PayoffKind kind = PayoffKind::Call;
    double strike = 100.0;

    double operator()(double s) const {
        return kind == PayoffKind::Call ? std::max(s - strike, 0.0) : std::max(strike - s, 0.0);
    }
};

inline std::string_view to_string(PayoffKind k) { return k == PayoffKind::Call ? "call" : "put"; }

inline std::optional<PayoffKind> parse_payoff_kind(std::string_view s) {
    if (s == "call") return PayoffKind::Call;
    if (s == "put") return PayoffKind::Put;
    return std::nullopt;
}

}  // namespace ncbs
