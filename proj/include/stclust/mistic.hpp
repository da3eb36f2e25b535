#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stclust/grid.hpp"
#include "stclust/ingest.hpp"
#include "stclust/zone_map.hpp"

namespace stclust::mistic {

enum class Orientation : std::uint8_t { maxima, minima };
enum class CoreMode : std::uint8_t { CC, CR };
enum class Dominance : std::uint8_t { CHD, CLD, CND };

std::string_view to_string(Orientation o);
std::string_view to_string(CoreMode m);
std::string_view to_string(Dominance d);
Orientation parse_orientation(std::string_view text);
CoreMode parse_core_mode(std::string_view text);

/// "auto" orientation: minima for minimum-temperature variables (tmin, tasmin,
/// anything containing "min"), maxima for "max" variables. Throws
/// ParameterError when the name is ambiguous.
Orientation orientation_for_variable(std::string_view variable);

struct FocusPoint {
    CellIndex cell;
    int year = 0;
    double value = 0.0;

    friend bool operator==(const FocusPoint&, const FocusPoint&) = default;
};

/// Strict local extrema among unmasked 8-neighbors. An 8-connected plateau of
/// equal values whose whole unmasked boundary is strictly lower (maxima) or
/// higher (minima) contributes one focus at its smallest (row, col). A plateau
/// with an empty boundary counts as extremal unless it covers every unmasked
/// cell, in which case the field has no focus at all. Output is row-major.
std::vector<FocusPoint> detect_focus_points(const ScalarField& field, Orientation orientation, int year = 0);

struct YearZones {
    int year = 0;
    ZoneMap zones;                    // label i is seeded by anchors[i]
    std::vector<CellIndex> unreached;  // unmasked cells no focus could flood into
};

/// Priority-flood region growing from the foci. The queue pops the extremal
/// value first (largest for maxima), then smaller (row, col), then earlier
/// insertion. Label i belongs to foci[i].
YearZones watershed_zones(const ScalarField& field, const std::vector<FocusPoint>& foci, Orientation orientation);

struct FocusFrequency {
    CellIndex cell;
    std::size_t count = 0;
    double frequency = 0.0;  // count / total_years
    bool frequent = false;   // count >= min_years
};

struct FocusFrequencyTable {
    std::size_t total_years = 0;
    std::size_t min_years = 0;
    std::vector<FocusFrequency> entries;  // sorted by cell

    const FocusFrequency* find(CellIndex cell) const;
    std::vector<CellIndex> frequent_cells() const;
};

/// True iff count/total >= threshold, evaluated without rounding the ratio.
bool frequency_at_least(std::size_t count, std::size_t total, std::size_t threshold_num, std::size_t threshold_den);

/// Counts, per exact cell, the number of years in which it was a focus.
FocusFrequencyTable mine_frequent_foci(const std::vector<std::vector<FocusPoint>>& yearly_foci,
                                       std::size_t total_years, std::size_t min_years);

struct CoreMember {
    CellIndex cell;
    std::size_t count = 0;
    double frequency = 0.0;
};

struct Core {
    std::size_t id = 0;
    std::vector<CoreMember> members;  // sorted by cell
    CoreMode mode = CoreMode::CC;
    std::size_t radius = 0;  // CR only
    std::optional<Dominance> dominance;
    std::vector<CellIndex> extent;  // sorted union of member zones over all years

    double max_frequency() const;
    bool contains(CellIndex cell) const;
};

/// Groups every observed focus cell into cores. CC: 8-connected components.
/// CR: transitive closure of "Chebyshev distance <= radius". CR with radius 1
/// is the same relation as CC and is reported as CC. Ids follow decreasing
/// maximum member frequency, then smallest member cell. Dominance is left
/// unset; see classify_core.
std::vector<Core> build_cores(const FocusFrequencyTable& table, CoreMode mode, std::size_t radius,
                              const std::vector<YearZones>& yearly_zones);

inline constexpr double kDefaultThetaDom = 12.0 / 31.0;
inline constexpr double kDefaultThetaHigh = 0.60;

Dominance classify_core(const Core& core, const FocusFrequencyTable& table, double theta_high = kDefaultThetaHigh,
                        double theta_dom = kDefaultThetaDom);

/// Translates each year's zones to core ids and takes the per-cell mode,
/// breaking ties toward the smaller core id. Labels of the result are core ids;
/// anchors[i] is the most frequent member of core i.
ZoneMap consensus_zone_map(const std::vector<YearZones>& yearly_zones, const std::vector<Core>& cores);

struct MisticParams {
    Orientation orientation = Orientation::maxima;
    std::size_t min_years = 12;
    CoreMode mode = CoreMode::CC;
    std::size_t radius = 1;
    double theta_high = kDefaultThetaHigh;
    double theta_dom = kDefaultThetaDom;
    unsigned threads = 1;
};

struct MisticResult {
    std::vector<std::vector<FocusPoint>> yearly_foci;
    std::vector<YearZones> yearly_zones;
    FocusFrequencyTable table;
    std::vector<Core> cores;
    ZoneMap consensus;
    bool no_foci = false;
};

/// Yearly focus detection and watershed on the stack's combined domain, then
/// mining, core construction, classification and consensus.
MisticResult run_mistic(const AnnualMeanStack& stack, const MisticParams& params);

/// Per-year foci and zones only; the parallel stage of run_mistic.
std::vector<YearZones> yearly_watersheds(const AnnualMeanStack& stack, Orientation orientation, unsigned threads,
                                         std::vector<std::vector<FocusPoint>>* foci_out = nullptr);

}  // namespace stclust::mistic
