#include "stclust/mistic.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>

#include "stclust/error.hpp"
#include "stclust/parallel.hpp"

namespace stclust::mistic {

namespace {

std::string cell_text(CellIndex c) {
    return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

/// Extremal-first ordering for the flood queue.
struct FloodEntry {
    double value;
    std::size_t flat;  // row-major, so comparing flats compares (row, col)
    std::uint64_t seq;
    std::int32_t label;
};

struct FloodLater {
    bool maxima;
    // true when a should pop after b
    bool operator()(const FloodEntry& a, const FloodEntry& b) const {
        if (a.value != b.value) return maxima ? a.value < b.value : a.value > b.value;
        if (a.flat != b.flat) return a.flat > b.flat;
        return a.seq > b.seq;
    }
};

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

void check_thresholds(double theta_high, double theta_dom) {
    if (!(theta_dom > 0.0 && theta_dom <= theta_high && theta_high <= 1.0))
        throw ParameterError("dominance thresholds must satisfy 0 < theta_dom <= theta_high <= 1");
}

}  // namespace

std::string_view to_string(Orientation o) { return o == Orientation::maxima ? "maxima" : "minima"; }
std::string_view to_string(CoreMode m) { return m == CoreMode::CC ? "CC" : "CR"; }
std::string_view to_string(Dominance d) {
    switch (d) {
        case Dominance::CHD: return "CHD";
        case Dominance::CLD: return "CLD";
        case Dominance::CND: return "CND";
    }
    return "CND";
}

Orientation parse_orientation(std::string_view text) {
    if (text == "maxima") return Orientation::maxima;
    if (text == "minima") return Orientation::minima;
    throw ParameterError("unknown orientation '" + std::string(text) + "'");
}

CoreMode parse_core_mode(std::string_view text) {
    if (text == "cc" || text == "CC") return CoreMode::CC;
    if (text == "cr" || text == "CR") return CoreMode::CR;
    throw ParameterError("unknown core mode '" + std::string(text) + "'");
}

Orientation orientation_for_variable(std::string_view variable) {
    std::string lower(variable);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    const bool has_min = lower.find("min") != std::string::npos;
    const bool has_max = lower.find("max") != std::string::npos;
    if (has_min && !has_max) return Orientation::minima;
    if (has_max && !has_min) return Orientation::maxima;
    throw ParameterError("cannot infer orientation from variable '" + std::string(variable) +
                         "'; pass --orientation maxima|minima");
}

std::vector<FocusPoint> detect_focus_points(const ScalarField& field, Orientation orientation, int year) {
    const auto& g = field.geometry();
    const auto valid_total = field.valid_count();
    if (valid_total == 0) throw DomainError("field has no unmasked cells");

    const auto values = field.values();
    const auto mask = field.mask();
    std::vector<std::uint8_t> visited(g.cell_count(), 0);
    std::vector<std::size_t> plateau;
    std::vector<FocusPoint> foci;
    CellIndex nbr[8];

    for (std::size_t start = 0; start < g.cell_count(); ++start) {
        if (!mask[start] || visited[start]) continue;
        const double v = values[start];
        plateau.assign(1, start);
        visited[start] = 1;
        bool extremal = true;
        for (std::size_t head = 0; head < plateau.size(); ++head) {
            const auto n = neighbors8_into(g, mask, g.cell(plateau[head]), nbr);
            for (std::size_t k = 0; k < n; ++k) {
                const auto flat = g.index(nbr[k]);
                const double w = values[flat];
                if (w == v) {
                    if (!visited[flat]) {
                        visited[flat] = 1;
                        plateau.push_back(flat);
                    }
                } else if (orientation == Orientation::maxima ? w > v : w < v) {
                    extremal = false;
                }
            }
        }
        // `start` is the plateau's smallest cell because the scan is row-major.
        if (extremal && plateau.size() < valid_total) foci.push_back({g.cell(start), year, v});
    }
    return foci;
}

YearZones watershed_zones(const ScalarField& field, const std::vector<FocusPoint>& foci, Orientation orientation) {
    if (foci.empty()) throw ParameterError("watershed needs at least one focus");
    const auto& g = field.geometry();
    const auto mask = field.mask();
    const auto values = field.values();

    YearZones out;
    out.year = foci.front().year;
    out.zones = ZoneMap::unlabeled(g);
    out.zones.zone_count = foci.size();
    auto& labels = out.zones.labels;

    std::priority_queue<FloodEntry, std::vector<FloodEntry>, FloodLater> queue(
        FloodLater{orientation == Orientation::maxima});
    std::uint64_t seq = 0;
    std::set<CellIndex> seen;
    for (std::size_t i = 0; i < foci.size(); ++i) {
        const auto c = foci[i].cell;
        if (!g.contains(c)) throw BoundsError("focus " + cell_text(c) + " is outside the grid");
        if (!field.valid(c)) throw ParameterError("focus " + cell_text(c) + " lies on a masked cell");
        if (!seen.insert(c).second) throw ParameterError("duplicate focus " + cell_text(c));
        out.zones.anchors.push_back(c);
        queue.push({values[g.index(c)], g.index(c), seq++, static_cast<std::int32_t>(i)});
    }

    CellIndex nbr[8];
    while (!queue.empty()) {
        const auto e = queue.top();
        queue.pop();
        if (labels[e.flat] != ZoneMap::kUnlabeled) continue;
        labels[e.flat] = e.label;
        const auto n = neighbors8_into(g, mask, g.cell(e.flat), nbr);
        for (std::size_t k = 0; k < n; ++k) {
            const auto flat = g.index(nbr[k]);
            if (labels[flat] == ZoneMap::kUnlabeled) queue.push({values[flat], flat, seq++, e.label});
        }
    }

    for (std::size_t i = 0; i < labels.size(); ++i)
        if (mask[i] && labels[i] == ZoneMap::kUnlabeled) out.unreached.push_back(g.cell(i));
    return out;
}

const FocusFrequency* FocusFrequencyTable::find(CellIndex cell) const {
    const auto it = std::lower_bound(entries.begin(), entries.end(), cell,
                                     [](const FocusFrequency& e, CellIndex c) { return e.cell < c; });
    return it != entries.end() && it->cell == cell ? &*it : nullptr;
}

std::vector<CellIndex> FocusFrequencyTable::frequent_cells() const {
    std::vector<CellIndex> out;
    for (const auto& e : entries)
        if (e.frequent) out.push_back(e.cell);
    return out;
}

bool frequency_at_least(std::size_t count, std::size_t total, std::size_t threshold_num, std::size_t threshold_den) {
    return static_cast<unsigned __int128>(count) * threshold_den >=
           static_cast<unsigned __int128>(threshold_num) * total;
}

FocusFrequencyTable mine_frequent_foci(const std::vector<std::vector<FocusPoint>>& yearly_foci,
                                       std::size_t total_years, std::size_t min_years) {
    if (total_years < 1) throw ParameterError("total_years must be at least 1");
    if (min_years < 1) throw ParameterError("min_years must be at least 1");
    if (yearly_foci.size() > total_years)
        throw ParameterError("more yearly focus lists (" + std::to_string(yearly_foci.size()) + ") than total_years (" +
                             std::to_string(total_years) + ")");

    std::map<CellIndex, std::size_t> counts;
    for (const auto& year : yearly_foci) {
        std::set<CellIndex> cells;
        for (const auto& f : year) cells.insert(f.cell);
        for (const auto& c : cells) ++counts[c];
    }

    FocusFrequencyTable table;
    table.total_years = total_years;
    table.min_years = min_years;
    table.entries.reserve(counts.size());
    for (const auto& [cell, count] : counts)
        table.entries.push_back({cell, count, static_cast<double>(count) / static_cast<double>(total_years),
                                 count >= min_years});
    return table;
}

double Core::max_frequency() const {
    double best = 0.0;
    for (const auto& m : members) best = std::max(best, m.frequency);
    return best;
}

bool Core::contains(CellIndex cell) const {
    return std::binary_search(members.begin(), members.end(), CoreMember{cell},
                              [](const CoreMember& a, const CoreMember& b) { return a.cell < b.cell; });
}

std::vector<Core> build_cores(const FocusFrequencyTable& table, CoreMode mode, std::size_t radius,
                              const std::vector<YearZones>& yearly_zones) {
    if (mode == CoreMode::CR && radius < 1) throw ParameterError("CR cores need radius >= 1");
    if (mode == CoreMode::CR && radius == 1) mode = CoreMode::CC;
    const std::size_t link = mode == CoreMode::CC ? 1 : radius;

    const auto& entries = table.entries;
    const auto n = entries.size();
    if (n == 0) return {};

    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i) {
        // entries are sorted by row, so rows beyond `link` can stop the scan
        for (std::size_t j = i + 1; j < n; ++j) {
            if (entries[j].cell.row > entries[i].cell.row + link) break;
            if (chebyshev(entries[i].cell, entries[j].cell) <= link) sets.unite(i, j);
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[sets.find(i)].push_back(i);

    std::vector<Core> cores;
    cores.reserve(groups.size());
    for (const auto& [root, idx] : groups) {
        Core core;
        core.mode = mode;
        core.radius = mode == CoreMode::CR ? radius : 0;
        for (auto i : idx) core.members.push_back({entries[i].cell, entries[i].count, entries[i].frequency});
        cores.push_back(std::move(core));
    }
    const auto max_count = [](const Core& c) {
        std::size_t m = 0;
        for (const auto& x : c.members) m = std::max(m, x.count);
        return m;
    };
    std::sort(cores.begin(), cores.end(), [&](const Core& a, const Core& b) {
        const auto ca = max_count(a), cb = max_count(b);
        if (ca != cb) return ca > cb;
        return a.members.front().cell < b.members.front().cell;
    });

    std::map<CellIndex, std::size_t> owner;
    for (std::size_t id = 0; id < cores.size(); ++id) {
        cores[id].id = id;
        for (const auto& m : cores[id].members) owner[m.cell] = id;
    }

    std::vector<std::vector<std::size_t>> extent(cores.size());
    for (const auto& yz : yearly_zones) {
        const auto& zm = yz.zones;
        std::vector<std::int64_t> zone_core(zm.anchors.size(), -1);
        for (std::size_t l = 0; l < zm.anchors.size(); ++l) {
            const auto it = owner.find(zm.anchors[l]);
            if (it != owner.end()) zone_core[l] = static_cast<std::int64_t>(it->second);
        }
        for (std::size_t i = 0; i < zm.labels.size(); ++i) {
            const auto l = zm.labels[i];
            if (l == ZoneMap::kUnlabeled || static_cast<std::size_t>(l) >= zone_core.size()) continue;
            if (zone_core[static_cast<std::size_t>(l)] >= 0)
                extent[static_cast<std::size_t>(zone_core[static_cast<std::size_t>(l)])].push_back(i);
        }
    }
    for (std::size_t id = 0; id < cores.size(); ++id) {
        std::set<CellIndex> cells;
        for (const auto& m : cores[id].members) cells.insert(m.cell);
        if (!yearly_zones.empty()) {
            const auto& g = yearly_zones.front().zones.geometry;
            for (auto flat : extent[id]) cells.insert(g.cell(flat));
        }
        cores[id].extent.assign(cells.begin(), cells.end());
    }
    return cores;
}

Dominance classify_core(const Core& core, const FocusFrequencyTable& table, double theta_high, double theta_dom) {
    check_thresholds(theta_high, theta_dom);
    double best = 0.0;
    for (const auto& m : core.members) {
        const auto* e = table.find(m.cell);
        best = std::max(best, e ? e->frequency : m.frequency);
    }
    if (best >= theta_high) return Dominance::CHD;
    if (best >= theta_dom) return Dominance::CLD;
    return Dominance::CND;
}

ZoneMap consensus_zone_map(const std::vector<YearZones>& yearly_zones, const std::vector<Core>& cores) {
    if (yearly_zones.empty()) throw ParameterError("consensus needs at least one year of zones");
    if (cores.empty()) throw ParameterError("consensus needs at least one core");
    const auto& g = yearly_zones.front().zones.geometry;
    for (const auto& yz : yearly_zones)
        if (!(yz.zones.geometry == g)) throw ShapeError("yearly zone maps must share one geometry");

    std::map<CellIndex, std::size_t> owner;
    for (std::size_t id = 0; id < cores.size(); ++id)
        for (const auto& m : cores[id].members) owner.emplace(m.cell, id);

    const auto nearest_core = [&](CellIndex anchor) {
        std::size_t best_id = 0;
        std::size_t best_d = static_cast<std::size_t>(-1);
        for (std::size_t id = 0; id < cores.size(); ++id)
            for (const auto& m : cores[id].members) {
                const auto d = chebyshev(anchor, m.cell);
                if (d < best_d) {
                    best_d = d;
                    best_id = id;
                }
            }
        return best_id;
    };

    std::vector<std::vector<std::int32_t>> translated;
    translated.reserve(yearly_zones.size());
    for (const auto& yz : yearly_zones) {
        std::vector<std::int32_t> to_core(yz.zones.anchors.size());
        for (std::size_t l = 0; l < to_core.size(); ++l) {
            const auto it = owner.find(yz.zones.anchors[l]);
            to_core[l] = static_cast<std::int32_t>(it != owner.end() ? it->second : nearest_core(yz.zones.anchors[l]));
        }
        translated.push_back(std::move(to_core));
    }

    ZoneMap out = ZoneMap::unlabeled(g);
    out.zone_count = cores.size();
    for (const auto& core : cores) {
        const CoreMember* rep = &core.members.front();
        for (const auto& m : core.members)
            if (m.count > rep->count) rep = &m;
        out.anchors.push_back(rep->cell);
    }

    std::vector<std::uint32_t> votes(cores.size(), 0);
    std::vector<std::size_t> touched;
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        touched.clear();
        for (std::size_t y = 0; y < yearly_zones.size(); ++y) {
            const auto l = yearly_zones[y].zones.labels[i];
            if (l == ZoneMap::kUnlabeled) continue;
            const auto core = static_cast<std::size_t>(translated[y][static_cast<std::size_t>(l)]);
            if (votes[core]++ == 0) touched.push_back(core);
        }
        if (touched.empty()) continue;
        std::size_t best = touched.front();
        for (auto c : touched)
            if (votes[c] > votes[best] || (votes[c] == votes[best] && c < best)) best = c;
        out.labels[i] = static_cast<std::int32_t>(best);
        for (auto c : touched) votes[c] = 0;
    }
    return out;
}

std::vector<YearZones> yearly_watersheds(const AnnualMeanStack& stack, Orientation orientation, unsigned threads,
                                         std::vector<std::vector<FocusPoint>>* foci_out) {
    if (stack.fields.empty()) throw ParameterError("annual stack is empty");
    const auto years = stack.fields.size();
    std::vector<YearZones> zones(years);
    std::vector<std::vector<FocusPoint>> foci(years);
    parallel_for(years, threads, [&](std::size_t i) {
        const auto field = stack.fields[i].restricted_to(stack.combined_mask);
        foci[i] = detect_focus_points(field, orientation, stack.years[i]);
        if (foci[i].empty()) {
            zones[i].year = stack.years[i];
            zones[i].zones = ZoneMap::unlabeled(field.geometry());
            for (std::size_t c = 0; c < field.geometry().cell_count(); ++c)
                if (field.valid(c)) zones[i].unreached.push_back(field.geometry().cell(c));
        } else {
            zones[i] = watershed_zones(field, foci[i], orientation);
        }
    });
    if (foci_out) *foci_out = std::move(foci);
    return zones;
}

MisticResult run_mistic(const AnnualMeanStack& stack, const MisticParams& params) {
    check_thresholds(params.theta_high, params.theta_dom);
    if (params.min_years < 1) throw ParameterError("min_years must be at least 1");
    if (params.mode == CoreMode::CR && params.radius < 1) throw ParameterError("CR cores need radius >= 1");

    MisticResult result;
    result.yearly_zones = yearly_watersheds(stack, params.orientation, params.threads, &result.yearly_foci);
    result.table = mine_frequent_foci(result.yearly_foci, stack.fields.size(), params.min_years);
    result.cores = build_cores(result.table, params.mode, params.radius, result.yearly_zones);
    for (auto& core : result.cores)
        core.dominance = classify_core(core, result.table, params.theta_high, params.theta_dom);
    if (result.cores.empty()) {
        result.no_foci = true;
        result.consensus = ZoneMap::unlabeled(stack.geometry);
    } else {
        result.consensus = consensus_zone_map(result.yearly_zones, result.cores);
    }
    return result;
}

}  // namespace stclust::mistic
