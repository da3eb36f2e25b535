#include "stclust/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"

#include "stclust/error.hpp"
#include "stclust/parallel.hpp"

namespace stclust {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kReportCap = 100;

class Issues {
public:
    void add(std::string message) {
        if (report_.violations.size() < kReportCap)
            report_.violations.push_back(std::move(message));
        else
            ++report_.suppressed;
    }
    bool empty() const { return report_.violations.empty(); }
    ValidationReport take() { return std::move(report_); }

private:
    ValidationReport report_;
};

std::string read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed reading " + file.string());
    return std::move(ss).str();
}

void write_file(const fs::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + file.string());
    out << content;
    if (!out) throw IoError("failed writing " + file.string());
}

void append_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

bool parse_number(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

std::string cell_text(const GridGeometry& g, std::size_t flat) {
    const auto c = g.cell(flat);
    return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

/// Parses one data/<year>.csv. Values equal to the sentinel become NaN.
/// Appends to `issues`; returns false if anything was wrong.
bool parse_year_payload(const fs::path& root, const DatasetManifest& m, int year, std::vector<double>* values,
                        Issues& issues) {
    const auto file = year_path(root, year);
    const auto rel = "data/" + std::to_string(year) + ".csv";
    if (!fs::exists(file)) {
        issues.add("year " + std::to_string(year) + ": missing payload file " + rel);
        return false;
    }
    std::string text;
    try {
        text = read_file(file);
    } catch (const IoError& e) {
        issues.add("year " + std::to_string(year) + ": " + e.what());
        return false;
    }

    const auto cells = m.geometry.cell_count();
    const auto expected_days = static_cast<std::size_t>(days_in_year(m.calendar, year));
    if (values) values->assign(expected_days * cells, std::numeric_limits<double>::quiet_NaN());

    bool ok = true;
    std::size_t day = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view line(text.data() + pos, eol - pos);
        pos = eol + 1;

        const auto where = "year " + std::to_string(year) + " day " + std::to_string(day);
        if (!line.empty() && line.back() == '\r') {
            issues.add(where + ": CRLF line ending (LF required)");
            ok = false;
            line.remove_suffix(1);
        }
        std::size_t field = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const auto token = line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start);
            if (field < cells) {
                double v = 0.0;
                if (!parse_number(token, v)) {
                    issues.add(where + " cell " + cell_text(m.geometry, field) + ": cannot parse '" +
                               std::string(token) + "'");
                    ok = false;
                } else if (v == m.missing_value) {
                    // stays NaN
                } else if (!std::isfinite(v)) {
                    issues.add(where + " cell " + cell_text(m.geometry, field) + ": non-finite value '" +
                               std::string(token) + "'");
                    ok = false;
                } else if (values && day < expected_days) {
                    (*values)[day * cells + field] = v;
                }
            }
            ++field;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (field != cells) {
            issues.add(where + ": " + std::to_string(field) + " values, expected " + std::to_string(cells) +
                       " (nrows*ncols)");
            ok = false;
        }
        ++day;
    }
    if (day != expected_days) {
        issues.add("year " + std::to_string(year) + ": " + std::to_string(day) + " daily lines, expected " +
                   std::to_string(expected_days) + " for the " + std::string(to_string(m.calendar.kind)) +
                   " calendar");
        ok = false;
    }
    return ok;
}

[[noreturn]] void throw_report(const std::string& prefix, ValidationReport report) {
    std::string msg = prefix;
    for (const auto& v : report.violations) msg += "\n  " + v;
    if (report.suppressed > 0) msg += "\n  ... and " + std::to_string(report.suppressed) + " more";
    throw ValidationError(msg);
}

}  // namespace

fs::path manifest_path(const fs::path& root) { return root / "manifest.json"; }
fs::path year_path(const fs::path& root, int year) { return root / "data" / (std::to_string(year) + ".csv"); }
fs::path elevation_path(const fs::path& root) { return root / "elevation.csv"; }

DatasetManifest DatasetManifest::from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("manifest must be a JSON object");

    static const std::set<std::string> kTop = {"variable", "units", "calendar", "geometry", "missing_value", "years"};
    static const std::set<std::string> kGeo = {"mode", "origin_lat", "origin_lon", "cell_dlat",
                                               "cell_dlon", "nrows", "ncols"};
    const auto check_keys = [](const ordered_json& obj, const std::set<std::string>& keys, const std::string& where) {
        for (const auto& [k, _] : obj.items())
            if (!keys.contains(k)) throw ValidationError("unknown field '" + k + "' in " + where);
        for (const auto& k : keys)
            if (!obj.contains(k)) throw ValidationError("missing field '" + k + "' in " + where);
    };
    check_keys(j, kTop, "manifest");
    const auto& geo = j.at("geometry");
    if (!geo.is_object()) throw ValidationError("manifest field 'geometry' must be an object");
    check_keys(geo, kGeo, "geometry");

    const auto number = [](const ordered_json& v, const char* name) {
        if (!v.is_number()) throw ValidationError(std::string("field '") + name + "' must be a number");
        return v.get<double>();
    };
    const auto count = [](const ordered_json& v, const char* name) {
        if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
            throw ValidationError(std::string("field '") + name + "' must be a positive integer");
        return static_cast<std::size_t>(v.get<std::uint64_t>());
    };
    const auto string = [](const ordered_json& v, const char* name) {
        if (!v.is_string()) throw ValidationError(std::string("field '") + name + "' must be a string");
        return v.get<std::string>();
    };

    DatasetManifest m;
    m.variable = string(j.at("variable"), "variable");
    const auto units = string(j.at("units"), "units");
    if (units != "celsius" && units != "kelvin")
        throw ValidationError("units must be \"celsius\" or \"kelvin\", got \"" + units + "\"");
    m.units = parse_units(units);
    try {
        m.calendar.kind = parse_calendar(string(j.at("calendar"), "calendar"));
        m.geometry.mode = parse_grid_mode(string(geo.at("mode"), "mode"));
    } catch (const ParameterError& e) {
        throw ValidationError(e.what());
    }
    m.geometry.origin_lat = number(geo.at("origin_lat"), "origin_lat");
    m.geometry.origin_lon = number(geo.at("origin_lon"), "origin_lon");
    m.geometry.cell_dlat = number(geo.at("cell_dlat"), "cell_dlat");
    m.geometry.cell_dlon = number(geo.at("cell_dlon"), "cell_dlon");
    m.geometry.nrows = count(geo.at("nrows"), "nrows");
    m.geometry.ncols = count(geo.at("ncols"), "ncols");
    m.missing_value = number(j.at("missing_value"), "missing_value");
    const auto& years = j.at("years");
    if (!years.is_array()) throw ValidationError("field 'years' must be an array of integers");
    for (const auto& y : years) {
        if (!y.is_number_integer()) throw ValidationError("field 'years' must be an array of integers");
        m.years.push_back(y.get<int>());
    }
    m.validate();
    return m;
}

std::string DatasetManifest::to_json() const {
    ordered_json j;
    j["variable"] = variable;
    j["units"] = std::string(to_string(units));
    j["calendar"] = std::string(to_string(calendar.kind));
    j["geometry"] = {{"mode", std::string(to_string(geometry.mode))},
                     {"origin_lat", geometry.origin_lat},
                     {"origin_lon", geometry.origin_lon},
                     {"cell_dlat", geometry.cell_dlat},
                     {"cell_dlon", geometry.cell_dlon},
                     {"nrows", geometry.nrows},
                     {"ncols", geometry.ncols}};
    j["missing_value"] = missing_value;
    j["years"] = years;
    return j.dump(2) + "\n";
}

void DatasetManifest::validate() const {
    if (units != Units::celsius && units != Units::kelvin)
        throw ValidationError("dataset units must be celsius or kelvin");
    try {
        geometry.validate();
    } catch (const ParameterError& e) {
        throw ValidationError(std::string("geometry: ") + e.what());
    }
    if (!std::isfinite(missing_value) ||
        (missing_value >= kPlausibleTemperatureMin && missing_value <= kPlausibleTemperatureMax)) {
        std::ostringstream ss;
        ss << "missing_value " << missing_value << " could be a valid temperature; it must lie outside ["
           << kPlausibleTemperatureMin << ", " << kPlausibleTemperatureMax << "]";
        throw ValidationError(ss.str());
    }
    if (years.empty()) throw ValidationError("manifest lists no years");
    for (std::size_t i = 1; i < years.size(); ++i)
        if (years[i] <= years[i - 1])
            throw ValidationError("years must be strictly increasing (" + std::to_string(years[i - 1]) + " then " +
                                  std::to_string(years[i]) + ")");
}

DatasetManifest read_manifest(const fs::path& root) {
    const auto file = manifest_path(root);
    if (!fs::is_regular_file(file)) throw IoError("manifest not found: " + file.string());
    return DatasetManifest::from_json(read_file(file));
}

ValidationReport validate_dataset(const fs::path& root) {
    Issues issues;
    DatasetManifest m;
    try {
        m = read_manifest(root);
    } catch (const ValidationError& e) {
        issues.add(std::string("manifest: ") + e.what());
        return issues.take();
    }
    for (int year : m.years) parse_year_payload(root, m, year, nullptr, issues);
    if (fs::exists(elevation_path(root))) {
        try {
            load_grid_csv(elevation_path(root), m.geometry, m.missing_value);
        } catch (const Error& e) {
            issues.add(std::string("elevation.csv: ") + e.what());
        }
    }
    return issues.take();
}

DailySeriesGrid load_dataset(const fs::path& root) {
    const auto m = read_manifest(root);
    Issues issues;
    std::vector<DailySeriesGrid::Year> years;
    years.reserve(m.years.size());
    for (int year : m.years) {
        DailySeriesGrid::Year y{year, {}};
        parse_year_payload(root, m, year, &y.values, issues);
        years.push_back(std::move(y));
    }
    if (!issues.empty()) throw_report("dataset " + root.string() + " failed validation:", issues.take());
    return DailySeriesGrid(m.geometry, m.calendar, m.units, std::move(years));
}

void write_dataset(const fs::path& root, const DailySeriesGrid& series, const std::string& variable,
                   double missing_value) {
    DatasetManifest m;
    m.variable = variable;
    m.units = series.units();
    m.calendar = series.calendar();
    m.geometry = series.geometry();
    m.missing_value = missing_value;
    m.years = series.years();
    m.validate();

    std::error_code ec;
    fs::create_directories(root / "data", ec);
    if (ec) throw IoError("cannot create " + (root / "data").string() + ": " + ec.message());
    write_file(manifest_path(root), m.to_json());

    const auto cells = m.geometry.cell_count();
    std::string text;
    for (std::size_t yi = 0; yi < series.year_count(); ++yi) {
        const auto& y = series.year_at(yi);
        text.clear();
        text.reserve(y.values.size() * 8);
        for (std::size_t d = 0; d * cells < y.values.size(); ++d) {
            for (std::size_t c = 0; c < cells; ++c) {
                if (c > 0) text += ',';
                const double v = y.values[d * cells + c];
                append_number(text, std::isnan(v) ? missing_value : v);
            }
            text += '\n';
        }
        write_file(year_path(root, y.year), text);
    }
}

ScalarField load_grid_csv(const fs::path& file, const GridGeometry& geometry, double missing_value, Units units) {
    const auto text = read_file(file);
    std::vector<double> values(geometry.cell_count(), 0.0);
    std::vector<std::uint8_t> mask(geometry.cell_count(), 0);
    std::size_t row = 0;
    std::size_t pos = 0;
    const auto name = file.filename().string();
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string_view line(text.data() + pos, eol - pos);
        pos = eol + 1;
        if (row >= geometry.nrows)
            throw ValidationError(name + ": more than " + std::to_string(geometry.nrows) + " lines");
        std::size_t col = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const auto token = line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start);
            if (col >= geometry.ncols)
                throw ValidationError(name + " line " + std::to_string(row) + ": more than " +
                                      std::to_string(geometry.ncols) + " values");
            double v = 0.0;
            if (!parse_number(token, v))
                throw ValidationError(name + " line " + std::to_string(row) + ": cannot parse '" +
                                      std::string(token) + "'");
            if (v != missing_value) {
                if (!std::isfinite(v))
                    throw ValidationError(name + " line " + std::to_string(row) + ": non-finite value");
                values[row * geometry.ncols + col] = v;
                mask[row * geometry.ncols + col] = 1;
            }
            ++col;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (col != geometry.ncols)
            throw ValidationError(name + " line " + std::to_string(row) + ": " + std::to_string(col) +
                                  " values, expected " + std::to_string(geometry.ncols));
        ++row;
    }
    if (row != geometry.nrows)
        throw ValidationError(name + ": " + std::to_string(row) + " lines, expected " +
                              std::to_string(geometry.nrows));
    return ScalarField(geometry, std::move(values), std::move(mask), units);
}

void write_grid_csv(const fs::path& file, const ScalarField& field, double missing_value) {
    const auto& g = field.geometry();
    std::string text;
    for (std::size_t r = 0; r < g.nrows; ++r) {
        for (std::size_t c = 0; c < g.ncols; ++c) {
            if (c > 0) text += ',';
            const CellIndex cell{r, c};
            append_number(text, field.valid(cell) ? field.at(cell) : missing_value);
        }
        text += '\n';
    }
    write_file(file, text);
}

ScalarField annual_mean(const DailySeriesGrid& series, int year, double min_valid_fraction) {
    if (!(min_valid_fraction > 0.0 && min_valid_fraction <= 1.0))
        throw ParameterError("min_valid_fraction must be in (0, 1]");
    const auto& y = series.year(year);
    const auto cells = series.geometry().cell_count();
    const auto days = y.values.size() / cells;

    std::vector<double> sum(cells, 0.0);
    std::vector<double> lo(cells, std::numeric_limits<double>::infinity());
    std::vector<double> hi(cells, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> count(cells, 0);
    for (std::size_t d = 0; d < days; ++d) {
        const double* layer = y.values.data() + d * cells;
        for (std::size_t c = 0; c < cells; ++c) {
            const double v = layer[c];
            if (std::isnan(v)) continue;
            sum[c] += v;
            lo[c] = std::min(lo[c], v);
            hi[c] = std::max(hi[c], v);
            ++count[c];
        }
    }

    std::vector<double> mean(cells, 0.0);
    std::vector<std::uint8_t> mask(cells, 0);
    for (std::size_t c = 0; c < cells; ++c) {
        if (count[c] == 0) continue;
        if (static_cast<double>(count[c]) < min_valid_fraction * static_cast<double>(days)) continue;
        // Rounding in the running sum can push the quotient just past the extremes.
        mean[c] = std::clamp(sum[c] / static_cast<double>(count[c]), lo[c], hi[c]);
        mask[c] = 1;
    }
    return ScalarField(series.geometry(), std::move(mean), std::move(mask), series.units());
}

AnnualMeanStack make_stack(std::vector<int> years, std::vector<ScalarField> fields) {
    if (fields.empty()) throw ParameterError("annual stack needs at least one year");
    if (years.size() != fields.size()) throw ShapeError("one field per year is required");
    AnnualMeanStack stack;
    stack.geometry = fields.front().geometry();
    stack.units = fields.front().units();
    stack.combined_mask.assign(stack.geometry.cell_count(), 1);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0 && years[i] <= years[i - 1]) throw ParameterError("stack years must be strictly increasing");
        if (!(fields[i].geometry() == stack.geometry)) throw ShapeError("stack fields must share one geometry");
        if (fields[i].units() != stack.units) throw UnitError("stack fields must share one unit");
        for (std::size_t c = 0; c < stack.combined_mask.size(); ++c)
            if (!fields[i].valid(c)) stack.combined_mask[c] = 0;
    }
    stack.years = std::move(years);
    stack.fields = std::move(fields);
    return stack;
}

AnnualMeanStack build_annual_stack(const DailySeriesGrid& series, double min_valid_fraction, unsigned threads) {
    if (series.year_count() == 0) throw ParameterError("series has no years");
    const auto years = series.years();
    std::vector<std::optional<ScalarField>> slots(years.size());
    parallel_for(years.size(), threads,
                 [&](std::size_t i) { slots[i].emplace(annual_mean(series, years[i], min_valid_fraction)); });
    std::vector<ScalarField> fields;
    fields.reserve(slots.size());
    for (auto& s : slots) fields.push_back(std::move(*s));
    return make_stack(years, std::move(fields));
}

AnnualMeanStack load_annual_stack(const fs::path& root, double min_valid_fraction) {
    const auto m = read_manifest(root);
    std::vector<ScalarField> fields;
    fields.reserve(m.years.size());
    for (int year : m.years) {
        Issues issues;
        DailySeriesGrid::Year y{year, {}};
        parse_year_payload(root, m, year, &y.values, issues);
        if (!issues.empty()) throw_report("dataset " + root.string() + " failed validation:", issues.take());
        std::vector<DailySeriesGrid::Year> one;
        one.push_back(std::move(y));
        const DailySeriesGrid single(m.geometry, m.calendar, m.units, std::move(one));
        fields.push_back(annual_mean(single, year, min_valid_fraction));
    }
    return make_stack(m.years, std::move(fields));
}

}  // namespace stclust
