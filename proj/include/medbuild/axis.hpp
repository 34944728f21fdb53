#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>

namespace medbuild {

/// World-frame point in integer millimetres.
struct MmPoint {
    std::int64_t x = 0;
    std::int64_t y = 0;

    auto operator<=>(const MmPoint&) const = default;
};

enum class AxisType { Podium, TowerMid, TowerHigh };

std::string_view to_string(AxisType type);  // "podium" | "tower_mid" | "tower_high"
std::optional<AxisType> axis_type_from_string(std::string_view name);

/// A straight circulation spine; rooms line both sides of a central corridor.
struct Axis {
    MmPoint start;
    MmPoint end;
    AxisType type = AxisType::Podium;

    double length() const;
    bool operator==(const Axis&) const = default;
};

}  // namespace medbuild
