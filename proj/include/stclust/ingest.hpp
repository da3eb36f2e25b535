#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stclust/calendar.hpp"
#include "stclust/grid.hpp"
#include "stclust/series.hpp"

namespace stclust {

/// Contents of `manifest.json` in a GTS dataset directory:
///
///     <root>/manifest.json
///     <root>/data/<year>.csv     one line per day, nrows*ncols values row-major
///     <root>/elevation.csv       optional, nrows lines of ncols values (meters)
struct DatasetManifest {
    std::string variable;
    Units units = Units::celsius;
    CalendarSpec calendar;
    GridGeometry geometry;
    double missing_value = -999.0;
    std::vector<int> years;

    /// Parses manifest JSON text. Unknown or missing fields are rejected.
    static DatasetManifest from_json(const std::string& text);
    std::string to_json() const;
    /// Throws ValidationError on the first broken invariant.
    void validate() const;
};

/// Sentinels inside this interval could be real temperatures (celsius or kelvin).
inline constexpr double kPlausibleTemperatureMin = -150.0;
inline constexpr double kPlausibleTemperatureMax = 400.0;

std::filesystem::path manifest_path(const std::filesystem::path& root);
std::filesystem::path year_path(const std::filesystem::path& root, int year);
std::filesystem::path elevation_path(const std::filesystem::path& root);

/// Reads and parses manifest.json. Throws IoError if it cannot be read and
/// ValidationError if it is malformed.
DatasetManifest read_manifest(const std::filesystem::path& root);

struct ValidationReport {
    std::vector<std::string> violations;
    std::size_t suppressed = 0;  // violations beyond the reporting cap
    bool ok() const { return violations.empty(); }
};

/// Checks every payload against the manifest without keeping the data.
/// Only an unreadable manifest throws (IoError); everything else is reported.
ValidationReport validate_dataset(const std::filesystem::path& root);

/// Loads and validates a dataset. Values equal to missing_value become NaN.
/// Throws ValidationError listing the violations found.
DailySeriesGrid load_dataset(const std::filesystem::path& root);

/// Writes a dataset directory in GTS format. NaN values are written as
/// `missing_value`. Values use the shortest round-trip decimal form.
void write_dataset(const std::filesystem::path& root, const DailySeriesGrid& series, const std::string& variable,
                   double missing_value);

/// Reads an `elevation.csv`-style grid (nrows lines of ncols values, meters).
ScalarField load_grid_csv(const std::filesystem::path& file, const GridGeometry& geometry, double missing_value,
                          Units units = Units::meters);
void write_grid_csv(const std::filesystem::path& file, const ScalarField& field, double missing_value);

/// Per-year annual means sharing geometry and units. combined_mask[i] is set
/// iff cell i is valid in every year.
struct AnnualMeanStack {
    GridGeometry geometry;
    Units units = Units::celsius;
    std::vector<int> years;
    std::vector<ScalarField> fields;
    std::vector<std::uint8_t> combined_mask;

    std::size_t size() const { return fields.size(); }
};

inline constexpr double kDefaultMinValidFraction = 1.0;

/// Mean over the year's valid days. A cell is masked when its fraction of valid
/// days is below min_valid_fraction.
ScalarField annual_mean(const DailySeriesGrid& series, int year, double min_valid_fraction = kDefaultMinValidFraction);

AnnualMeanStack build_annual_stack(const DailySeriesGrid& series,
                                   double min_valid_fraction = kDefaultMinValidFraction, unsigned threads = 1);

/// Builds a stack from fields that already share a geometry and units.
AnnualMeanStack make_stack(std::vector<int> years, std::vector<ScalarField> fields);

/// Streams a dataset directory year by year into annual means, so the full
/// daily series never has to be resident. Equal to
/// build_annual_stack(load_dataset(root), ...).
AnnualMeanStack load_annual_stack(const std::filesystem::path& root,
                                  double min_valid_fraction = kDefaultMinValidFraction);

}  // namespace stclust
