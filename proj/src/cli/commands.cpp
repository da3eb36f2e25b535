#include "stclust/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <thread>

#include "CLI11.hpp"

#include "stclust/analysis.hpp"
#include "stclust/error.hpp"
#include "stclust/ingest.hpp"
#include "stclust/kmeans.hpp"
#include "stclust/mistic.hpp"
#include "stclust/report.hpp"
#include "stclust/svg.hpp"
#include "stclust/synthetic.hpp"
#include "stclust/version.hpp"

namespace stclust::cli {

namespace fs = std::filesystem;
using report::Json;

namespace {

struct Options {
    std::string dataset;
    std::string out = ".";
    double min_valid_fraction = kDefaultMinValidFraction;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    int cell_pixels = 12;

    // kmeans
    std::vector<std::size_t> ks{8, 10, 12};
    std::uint64_t seed = 0;
    std::size_t restarts = 10;
    std::size_t max_iter = 300;
    double tol = 0.0;
    bool raw_features = false;

    // mistic
    std::string orientation = "auto";
    std::size_t min_years = 12;
    std::string mode = "cc";
    std::size_t radius = 1;
    double theta_high = mistic::kDefaultThetaHigh;
    double theta_dom = mistic::kDefaultThetaDom;

    // compare / render
    std::string labels_a;
    std::string labels_b;
    std::string elevation;
    std::string title;

    // make-demo
    synthetic::PlantedOptions demo;
    std::string demo_calendar = "360_day";
    std::optional<std::size_t> demo_b_years;
};

fs::path prepare_out(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    return fs::path(dir);
}

void require_dataset_dir(const std::string& dataset) {
    if (dataset.empty()) throw ParameterError("--dataset is required");
    if (!fs::is_directory(dataset)) throw IoError("dataset directory not found: " + dataset);
}

Json dataset_input(const std::string& dataset) {
    const auto name = fs::path(dataset).lexically_normal().filename().string();
    return Json{{"role", "dataset"}, {"name", name.empty() ? "." : name}, {"sha256", report::sha256_tree(dataset)}};
}

Json file_input(const std::string& role, const std::string& file) {
    return Json{{"role", role}, {"name", fs::path(file).filename().string()}, {"sha256", report::sha256_file(file)}};
}

void write_meta(const fs::path& out, const std::string& command, Json parameters, Json inputs,
                std::vector<std::string> outputs) {
    std::sort(outputs.begin(), outputs.end());
    Json meta{{"tool", "stclust"},
              {"version", kVersion},
              {"command", command},
              {"parameters", std::move(parameters)},
              {"inputs", std::move(inputs)},
              {"outputs", outputs}};
    report::write_text(out / "run_meta.json", report::dump(meta));
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
    require_dataset_dir(o.dataset);
    const auto result = validate_dataset(o.dataset);
    if (result.ok()) {
        const auto m = read_manifest(o.dataset);
        out << "OK " << o.dataset << ": variable " << m.variable << ", " << to_string(m.units) << ", "
            << to_string(m.calendar.kind) << " calendar, " << m.years.size() << " years, " << m.geometry.nrows << "x"
            << m.geometry.ncols << " grid\n";
        return kExitOk;
    }
    err << "INVALID " << o.dataset << ": " << result.violations.size() + result.suppressed << " violation(s)\n";
    for (const auto& v : result.violations) err << "  " << v << "\n";
    if (result.suppressed > 0) err << "  ... and " << result.suppressed << " more\n";
    return kExitInvalid;
}

int cmd_kmeans(const Options& o, std::ostream& out, std::ostream&) {
    require_dataset_dir(o.dataset);
    if (o.ks.empty()) throw ParameterError("--k needs at least one value");
    if (std::set<std::size_t>(o.ks.begin(), o.ks.end()).size() != o.ks.size())
        throw ParameterError("--k contains duplicate values");
    const auto stack = load_annual_stack(o.dataset, o.min_valid_fraction);
    const auto features = build_features(stack, !o.raw_features);
    for (auto k : o.ks)
        if (k < 1 || k > features.size())
            throw ParameterError("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(features.size()) + "]");

    const auto dir = prepare_out(o.out);
    Json runs = Json::array();
    std::vector<std::string> outputs{"kmeans_report.json"};
    for (auto k : o.ks) {
        KMeansParams p;
        p.k = k;
        p.seed = o.seed;
        p.max_iter = o.max_iter;
        p.tol = o.tol;
        p.restarts = o.restarts;
        p.threads = o.threads;
        const auto map = run_kmeans(features, p);
        const auto stem = "k" + std::to_string(k);
        report::write_text(dir / ("labels_" + stem + ".csv"), report::label_csv(map.labels));
        report::write_text(dir / ("map_" + stem + ".svg"),
                           svg::render_zone_map(map.labels, {"K-means, k = " + std::to_string(k), o.cell_pixels}));
        outputs.push_back("labels_" + stem + ".csv");
        outputs.push_back("map_" + stem + ".svg");
        runs.push_back(report::kmeans_run(map));
        out << "k=" << k << " inertia=" << map.inertia << " iterations=" << map.iterations << "\n";
    }
    Json rep{{"feature_years", stack.years},
             {"standardize", !o.raw_features},
             {"restarts", o.restarts},
             {"max_iter", o.max_iter},
             {"tol", o.tol},
             {"seed", o.seed},
             {"runs", runs}};
    report::write_text(dir / "kmeans_report.json", report::dump(rep));

    Json params{{"k", o.ks},           {"seed", o.seed}, {"restarts", o.restarts},
                {"max_iter", o.max_iter}, {"tol", o.tol},  {"standardize", !o.raw_features},
                {"min_valid_fraction", o.min_valid_fraction}};
    write_meta(dir, "kmeans", params, Json::array({dataset_input(o.dataset)}), outputs);
    return kExitOk;
}

int cmd_mistic(const Options& o, std::ostream& out, std::ostream&) {
    require_dataset_dir(o.dataset);
    mistic::MisticParams p;
    p.orientation = o.orientation == "auto" ? mistic::orientation_for_variable(read_manifest(o.dataset).variable)
                                            : mistic::parse_orientation(o.orientation);
    p.min_years = o.min_years;
    p.mode = mistic::parse_core_mode(o.mode);
    p.radius = o.radius;
    p.theta_high = o.theta_high;
    p.theta_dom = o.theta_dom;
    p.threads = o.threads;

    const auto stack = load_annual_stack(o.dataset, o.min_valid_fraction);
    const auto result = mistic::run_mistic(stack, p);

    const auto dir = prepare_out(o.out);
    std::vector<std::string> outputs{"foci.json", "cores.json", "consensus.csv", "map_consensus.svg"};
    for (const auto& yz : result.yearly_zones) {
        const auto name = "zones_" + std::to_string(yz.year) + ".csv";
        report::write_text(dir / name, report::label_csv(yz.zones));
        outputs.push_back(name);
    }
    report::write_text(dir / "foci.json", report::dump(report::focus_table(result)));
    report::write_text(dir / "cores.json", report::dump(report::cores(result, p)));
    report::write_text(dir / "consensus.csv", report::label_csv(result.consensus));
    report::write_text(dir / "map_consensus.svg",
                       svg::render_zone_map(result.consensus, {"MiSTIC consensus zones", o.cell_pixels}));

    Json params{{"orientation", std::string(mistic::to_string(p.orientation))},
                {"orientation_flag", o.orientation},
                {"min_years", p.min_years},
                {"mode", o.mode},
                {"radius", p.radius},
                {"theta_high", p.theta_high},
                {"theta_dom", p.theta_dom},
                {"min_valid_fraction", o.min_valid_fraction}};
    write_meta(dir, "mistic", params, Json::array({dataset_input(o.dataset)}), outputs);

    if (result.no_foci) {
        out << "notice: no foci detected; outputs are empty\n";
    } else {
        std::size_t frequent = 0;
        for (const auto& e : result.table.entries) frequent += e.frequent ? 1 : 0;
        out << result.table.entries.size() << " focus cells (" << frequent << " frequent), " << result.cores.size()
            << " cores\n";
    }
    return kExitOk;
}

std::optional<GridGeometry> dataset_geometry(const std::string& dataset) {
    if (dataset.empty()) return std::nullopt;
    require_dataset_dir(dataset);
    return read_manifest(dataset).geometry;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
    const auto geometry = dataset_geometry(o.dataset);
    auto a = report::read_label_csv(o.labels_a, geometry);
    auto b = report::read_label_csv(o.labels_b, geometry);
    if (!geometry && !(a.geometry == b.geometry)) {
        // Without a dataset the grid is inferred; widen both to the common bounding box.
        GridGeometry g = a.geometry;
        g.nrows = std::max(a.geometry.nrows, b.geometry.nrows);
        g.ncols = std::max(a.geometry.ncols, b.geometry.ncols);
        a = report::read_label_csv(o.labels_a, g);
        b = report::read_label_csv(o.labels_b, g);
    }
    const auto table = analysis::contingency(a, b);
    if (table.empty()) err << "warning: the two labelings share no labeled cells\n";

    std::optional<ScalarField> elevation;
    std::string elevation_file = o.elevation;
    if (elevation_file.empty() && !o.dataset.empty() && fs::exists(elevation_path(o.dataset)))
        elevation_file = elevation_path(o.dataset).string();
    if (!elevation_file.empty()) {
        if (!geometry) throw ParameterError("--elevation needs --dataset to supply the grid geometry");
        elevation = load_grid_csv(elevation_file, *geometry, read_manifest(o.dataset).missing_value);
    }
    std::optional<ScalarField> slope;
    if (elevation && elevation->geometry().nrows >= 3 && elevation->geometry().ncols >= 3)
        slope = slope_field(*elevation);
    std::optional<AnnualMeanStack> stack;
    if (!o.dataset.empty()) stack = load_annual_stack(o.dataset, o.min_valid_fraction);

    const auto sum_a = analysis::cluster_summary(a, elevation ? &*elevation : nullptr, slope ? &*slope : nullptr,
                                                 stack ? &*stack : nullptr);
    const auto sum_b = analysis::cluster_summary(b, elevation ? &*elevation : nullptr, slope ? &*slope : nullptr,
                                                 stack ? &*stack : nullptr);

    const auto dir = prepare_out(o.out);
    std::vector<std::string> outputs{"comparison.json", "summary.json"};
    auto cmp = report::comparison(table);
    report::write_text(dir / "comparison.json", report::dump(cmp));
    report::write_text(dir / "summary.json",
                       report::dump(Json{{"a", report::summary(sum_a)}, {"b", report::summary(sum_b)}}));
    if (elevation) {
        std::vector<svg::ScatterSeries> series;
        for (const auto* s : {&sum_a, &sum_b}) {
            svg::ScatterSeries sr{s == &sum_a ? "A" : "B", {}};
            for (const auto& c : s->clusters)
                if (c.mean_elevation && c.mean_slope)
                    sr.points.push_back({*c.mean_elevation, *c.mean_slope, "zone " + std::to_string(c.label)});
            series.push_back(std::move(sr));
        }
        report::write_text(dir / "elev_slope.svg",
                           svg::render_scatter(series, {"Average elevation vs slope per cluster",
                                                        "mean elevation (m)", "mean slope (degrees)"}));
        outputs.push_back("elev_slope.svg");
    }

    Json inputs = Json::array({file_input("labels_a", o.labels_a), file_input("labels_b", o.labels_b)});
    if (!o.dataset.empty()) inputs.push_back(dataset_input(o.dataset));
    if (!o.elevation.empty()) inputs.push_back(file_input("elevation", o.elevation));
    write_meta(dir, "compare", Json{{"min_valid_fraction", o.min_valid_fraction}}, inputs, outputs);

    if (cmp["adjusted_rand"].is_number())
        out << "ARI " << cmp["adjusted_rand"].get<double>() << " over " << table.total << " shared cells\n";
    return kExitOk;
}

int cmd_render(const Options& o, std::ostream& out, std::ostream&) {
    const auto geometry = dataset_geometry(o.dataset);
    const auto map = report::read_label_csv(o.labels_a, geometry);
    const auto dir = prepare_out(o.out);
    const auto name = fs::path(o.labels_a).stem().string() + ".svg";
    const auto title = o.title.empty() ? fs::path(o.labels_a).stem().string() : o.title;
    report::write_text(dir / name, svg::render_zone_map(map, {title, o.cell_pixels}));
    Json inputs = Json::array({file_input("labels", o.labels_a)});
    if (!o.dataset.empty()) inputs.push_back(dataset_input(o.dataset));
    write_meta(dir, "render", Json{{"title", title}, {"cell_pixels", o.cell_pixels}}, inputs, {name});
    out << "wrote " << (dir / name).string() << "\n";
    return kExitOk;
}

int cmd_make_demo(Options o, std::ostream& out, std::ostream&) {
    o.demo.calendar = parse_calendar(o.demo_calendar);
    // Place the peaks and cone size proportionally on grids other than 31 x 31.
    const auto scaled = [](std::size_t n, std::size_t at) { return (n * at * 2 + 31) / 62; };
    o.demo.peak_a = {scaled(o.demo.nrows, 8), scaled(o.demo.ncols, 8)};
    o.demo.peak_b = {scaled(o.demo.nrows, 22), scaled(o.demo.ncols, 22)};
    o.demo.cone_radius = 32.0 * static_cast<double>(std::max(o.demo.nrows, o.demo.ncols)) / 31.0;
    // Keep B's recurrence at the planted 15 of 31 ratio unless told otherwise.
    o.demo.b_exact_years = o.demo_b_years ? *o.demo_b_years : (o.demo.years * 15 + 15) / 31;
    const auto demo = synthetic::make_planted(o.demo);
    const auto dir = prepare_out(o.out);
    write_dataset(dir, demo.series, "tmax", -999.0);
    write_grid_csv(elevation_path(dir), demo.elevation, -999.0);
    report::write_text(dir / "truth_labels.csv", report::label_csv(demo.truth));
    out << "wrote demo dataset to " << dir.string() << " (" << demo.series.year_count() << " years, "
        << o.demo.nrows << "x" << o.demo.ncols << ")\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Spatiotemporal clustering of gridded temperature data (K-means and MiSTIC)", "stclust"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--min-valid-fraction", o.min_valid_fraction, "Minimum fraction of valid days per cell-year")
            ->check(CLI::Range(0.0, 1.0));
        sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--cell-pixels", o.cell_pixels, "SVG pixels per grid cell")->check(CLI::PositiveNumber);
    };

    std::function<int()> action;

    auto* validate = app.add_subcommand("validate", "Check a dataset directory against its manifest");
    validate->add_option("--dataset", o.dataset, "Dataset directory")->required();
    validate->callback([&] { action = [&] { return cmd_validate(o, out, err); }; });

    auto* kmeans = app.add_subcommand("kmeans", "K-means over per-cell annual-mean series");
    kmeans->add_option("--dataset", o.dataset, "Dataset directory")->required();
    kmeans->add_option("--out", o.out, "Output directory");
    kmeans->add_option("--k", o.ks, "Comma-separated cluster counts")->delimiter(',');
    kmeans->add_option("--seed", o.seed, "Seed for k-means++ initialisation");
    kmeans->add_option("--restarts", o.restarts, "Independent restarts per k")->check(CLI::PositiveNumber);
    kmeans->add_option("--max-iter", o.max_iter, "Iteration cap per restart")->check(CLI::PositiveNumber);
    kmeans->add_option("--tol", o.tol, "Stop when inertia improves by less than this")->check(CLI::NonNegativeNumber);
    kmeans->add_flag("--raw-features", o.raw_features, "Do not z-score the yearly features");
    add_common(kmeans);
    kmeans->callback([&] { action = [&] { return cmd_kmeans(o, out, err); }; });

    auto* mistic_cmd = app.add_subcommand("mistic", "MiSTIC focus mining, cores and consensus zones");
    mistic_cmd->add_option("--dataset", o.dataset, "Dataset directory")->required();
    mistic_cmd->add_option("--out", o.out, "Output directory");
    mistic_cmd->add_option("--orientation", o.orientation, "Seed extrema")
        ->check(CLI::IsMember({"maxima", "minima", "auto"}));
    mistic_cmd->add_option("--min-years", o.min_years, "Years a focus must recur to count as frequent")
        ->check(CLI::PositiveNumber);
    mistic_cmd->add_option("--mode", o.mode, "Core grouping")->check(CLI::IsMember({"cc", "cr"}));
    mistic_cmd->add_option("--radius", o.radius, "Chebyshev radius for CR cores")->check(CLI::PositiveNumber);
    mistic_cmd->add_option("--theta-high", o.theta_high, "Frequency marking a highly dominating focus");
    mistic_cmd->add_option("--theta-dom", o.theta_dom, "Frequency marking a dominating focus");
    add_common(mistic_cmd);
    mistic_cmd->callback([&] { action = [&] { return cmd_mistic(o, out, err); }; });

    auto* compare = app.add_subcommand("compare", "Compare two label files");
    compare->add_option("labels_a", o.labels_a, "First label CSV")->required();
    compare->add_option("labels_b", o.labels_b, "Second label CSV")->required();
    compare->add_option("--dataset", o.dataset, "Dataset directory (geometry, values, elevation.csv)");
    compare->add_option("--elevation", o.elevation, "Elevation grid CSV (meters)");
    compare->add_option("--out", o.out, "Output directory");
    add_common(compare);
    compare->callback([&] { action = [&] { return cmd_compare(o, out, err); }; });

    auto* render = app.add_subcommand("render", "Render a label CSV as an SVG map");
    render->add_option("labels", o.labels_a, "Label CSV")->required();
    render->add_option("--dataset", o.dataset, "Dataset directory supplying the grid geometry");
    render->add_option("--out", o.out, "Output directory");
    render->add_option("--title", o.title, "Map title");
    render->add_option("--cell-pixels", o.cell_pixels, "SVG pixels per grid cell")->check(CLI::PositiveNumber);
    render->callback([&] { action = [&] { return cmd_render(o, out, err); }; });

    auto* demo = app.add_subcommand("make-demo", "Write the synthetic planted two-core demo dataset");
    demo->add_option("--out", o.out, "Dataset directory to create")->required();
    demo->add_option("--seed", o.demo.seed, "Noise seed");
    demo->add_option("--years", o.demo.years, "Number of years")->check(CLI::PositiveNumber);
    demo->add_option("--first-year", o.demo.first_year, "First year");
    demo->add_option("--nrows", o.demo.nrows, "Grid rows")->check(CLI::PositiveNumber);
    demo->add_option("--ncols", o.demo.ncols, "Grid columns")->check(CLI::PositiveNumber);
    demo->add_option("--b-years", o.demo_b_years, "Years in which peak B sits on its own cell");
    demo->add_option("--calendar", o.demo_calendar, "Calendar")->check(CLI::IsMember({"gregorian", "360_day"}));
    demo->add_option("--noise-fraction", o.demo.noise_fraction, "Daily noise sd as a fraction of bump height");
    demo->add_option("--region-offset", o.demo.region_offset, "Alternating offset between the two regions");
    o.demo.region_offset = 4.0;
    demo->callback([&] { action = [&] { return cmd_make_demo(o, out, err); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(kVersion) + "\n" : app.help());
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    try {
        return action ? action() : kExitInvalid;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

}  // namespace stclust::cli
