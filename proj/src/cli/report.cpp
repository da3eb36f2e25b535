#include "stclust/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <memory>
#include <set>
#include <vector>

#include <openssl/evp.h>

#include "stclust/error.hpp"

namespace stclust::report {

namespace fs = std::filesystem;

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
            throw Error("cannot initialise SHA-256");
    }
    void update(std::string_view bytes) { EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size()); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += kDigits[md[i] >> 4];
            out += kDigits[md[i] & 0xF];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, void (*)(EVP_MD_CTX*)> ctx_;
};

void hash_file_into(Sha256& h, const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h.update({buf.data(), static_cast<std::size_t>(in.gcount())});
    }
}

std::string_view stop_text(StopReason r) {
    switch (r) {
        case StopReason::assignment_stable: return "assignment_stable";
        case StopReason::tolerance: return "tolerance";
        case StopReason::max_iterations: return "max_iterations";
    }
    return "max_iterations";
}

bool parse_index(std::string_view token, long long& out) {
    const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
    return res.ec == std::errc{} && res.ptr == token.data() + token.size();
}

}  // namespace

std::string label_csv(const ZoneMap& map) {
    std::string out = "row,col,label\n";
    for (std::size_t i = 0; i < map.labels.size(); ++i) {
        if (map.labels[i] == ZoneMap::kUnlabeled) continue;
        const auto c = map.geometry.cell(i);
        out += std::to_string(c.row) + ',' + std::to_string(c.col) + ',' + std::to_string(map.labels[i]) + '\n';
    }
    return out;
}

ZoneMap read_label_csv(const fs::path& file, const std::optional<GridGeometry>& geometry) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open label file " + file.string());
    std::string line;
    if (!std::getline(in, line) || line != "row,col,label")
        throw ValidationError(file.string() + ": expected header 'row,col,label'");

    struct Entry {
        std::size_t row, col;
        std::int32_t label;
    };
    std::vector<Entry> entries;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        long long v[3];
        std::size_t start = 0;
        bool ok = true;
        for (int k = 0; k < 3 && ok; ++k) {
            const auto comma = line.find(',', start);
            if ((k < 2) != (comma != std::string::npos)) ok = false;
            const auto end = comma == std::string::npos ? line.size() : comma;
            ok = ok && parse_index(std::string_view(line).substr(start, end - start), v[k]);
            start = end + 1;
        }
        if (!ok || v[0] < 0 || v[1] < 0 || v[2] < 0 || v[2] > INT32_MAX)
            throw ValidationError(file.string() + " line " + std::to_string(lineno) + ": malformed entry '" + line + "'");
        entries.push_back({static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]), static_cast<std::int32_t>(v[2])});
    }

    GridGeometry g;
    if (geometry) {
        g = *geometry;
    } else {
        if (entries.empty()) throw ValidationError(file.string() + ": no labeled cells and no geometry given");
        std::size_t rows = 0, cols = 0;
        for (const auto& e : entries) {
            rows = std::max(rows, e.row + 1);
            cols = std::max(cols, e.col + 1);
        }
        g = GridGeometry{GridMode::planar, 0.0, 0.0, 1.0, 1.0, rows, cols};
    }
    ZoneMap map = ZoneMap::unlabeled(g);
    std::set<std::int32_t> distinct;
    for (const auto& e : entries) {
        if (!g.contains({e.row, e.col}))
            throw ShapeError(file.string() + ": cell (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                             ") is outside the " + std::to_string(g.nrows) + "x" + std::to_string(g.ncols) + " grid");
        auto& slot = map.labels[g.index({e.row, e.col})];
        if (slot != ZoneMap::kUnlabeled)
            throw ValidationError(file.string() + ": cell (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                                  ") is listed twice");
        slot = e.label;
        distinct.insert(e.label);
    }
    map.zone_count = distinct.size();
    return map;
}

Json kmeans_run(const ClusterMap& map) {
    std::vector<std::size_t> sizes(map.k, 0);
    for (auto l : map.assignment) ++sizes[static_cast<std::size_t>(l)];
    return Json{{"k", map.k},
                {"inertia", map.inertia},
                {"iterations", map.iterations},
                {"stop", std::string(stop_text(map.stop))},
                {"seed", map.seed},
                {"cell_count", map.assignment.size()},
                {"cluster_sizes", sizes}};
}

Json focus_table(const mistic::MisticResult& result) {
    Json entries = Json::array();
    std::size_t frequent = 0;
    for (const auto& e : result.table.entries) {
        entries.push_back(Json{{"row", e.cell.row},
                               {"col", e.cell.col},
                               {"count", e.count},
                               {"frequency", e.frequency},
                               {"frequent", e.frequent}});
        frequent += e.frequent ? 1 : 0;
    }
    Json years = Json::array();
    for (std::size_t i = 0; i < result.yearly_zones.size(); ++i)
        years.push_back(Json{{"year", result.yearly_zones[i].year},
                             {"foci", result.yearly_foci[i].size()},
                             {"unreached_cells", result.yearly_zones[i].unreached.size()}});
    return Json{{"total_years", result.table.total_years},
                {"min_years", result.table.min_years},
                {"observed_count", result.table.entries.size()},
                {"frequent_count", frequent},
                {"entries", entries},
                {"years", years}};
}

Json cores(const mistic::MisticResult& result, const mistic::MisticParams& params) {
    Json list = Json::array();
    for (const auto& core : result.cores) {
        Json members = Json::array();
        for (const auto& m : core.members)
            members.push_back(Json{{"row", m.cell.row}, {"col", m.cell.col}, {"count", m.count}, {"frequency", m.frequency}});
        Json c{{"id", core.id}, {"mode", std::string(mistic::to_string(core.mode))}};
        if (core.mode == mistic::CoreMode::CR) c["radius"] = core.radius;
        c["class"] = core.dominance ? std::string(mistic::to_string(*core.dominance)) : std::string();
        c["max_frequency"] = core.max_frequency();
        c["member_count"] = core.members.size();
        c["members"] = members;
        c["extent_size"] = core.extent.size();
        list.push_back(c);
    }
    Json j{{"total_years", result.table.total_years},
           {"min_years", result.table.min_years},
           {"theta_high", params.theta_high},
           {"theta_dom", params.theta_dom},
           {"core_count", result.cores.size()}};
    if (result.no_foci) j["notice"] = "no foci detected";
    j["cores"] = list;
    return j;
}

Json comparison(const analysis::ContingencyTable& table) {
    Json j{{"labels_a", table.labels_a},
           {"labels_b", table.labels_b},
           {"counts", table.counts},
           {"shared_cells", table.total},
           {"only_a_cells", table.only_a},
           {"only_b_cells", table.only_b}};
    if (table.total >= 2)
        j["adjusted_rand"] = analysis::adjusted_rand(table);
    else
        j["adjusted_rand"] = nullptr;
    if (table.empty()) j["warning"] = "the two labelings share no labeled cells";
    Json pairs = Json::array();
    double sum = 0.0;
    for (const auto& p : analysis::matched_jaccard(table)) {
        pairs.push_back(Json{{"label_a", p.label_a ? Json(*p.label_a) : Json(nullptr)},
                             {"label_b", p.label_b ? Json(*p.label_b) : Json(nullptr)},
                             {"jaccard", p.jaccard}});
        sum += p.jaccard;
    }
    j["matched_jaccard"] = pairs;
    j["matched_jaccard_total"] = sum;
    return j;
}

Json summary(const analysis::SummaryReport& report) {
    const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    Json clusters = Json::array();
    for (const auto& c : report.clusters) {
        Json item{{"label", c.label},
                  {"cell_count", c.cell_count},
                  {"mean_elevation_m", opt(c.mean_elevation)},
                  {"mean_slope_deg", opt(c.mean_slope)}};
        if (c.values)
            item["values"] = Json{{"min", c.values->min}, {"mean", c.values->mean}, {"max", c.values->max}};
        else
            item["values"] = nullptr;
        clusters.push_back(item);
    }
    return Json{{"cluster_count", report.clusters.size()},
                {"clusters_with_elevation", report.clusters_with_elevation},
                {"low_band_m", report.low_band},
                {"high_band_m", report.high_band},
                {"fraction_below_low_band", opt(report.fraction_below_low_band)},
                {"fraction_above_high_band", opt(report.fraction_above_high_band)},
                {"clusters", clusters}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string sha256_bytes(std::string_view bytes) {
    Sha256 h;
    h.update(bytes);
    return h.hex();
}

std::string sha256_file(const fs::path& file) {
    Sha256 h;
    hash_file_into(h, file);
    return h.hex();
}

std::string sha256_tree(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir));
    std::sort(files.begin(), files.end());
    Sha256 h;
    for (const auto& rel : files) {
        const auto name = rel.generic_string();
        h.update(name);
        h.update(std::string_view("\0", 1));
        hash_file_into(h, dir / rel);
    }
    return h.hex();
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + file.string());
    out << text;
    if (!out) throw IoError("failed writing " + file.string());
}

}  // namespace stclust::report
