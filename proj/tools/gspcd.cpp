// gspcd command-line tool: ground scene prediction from SAR amplitude image
// stacks, change detection against a surveillance image, and Pd/FAR scoring.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "gspcd/gspcd.hpp"

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Console/report formatting: fixed 6 significant digits. File formats that
// must round-trip (rasters, roc.csv) use shortest-round-trip form instead.
std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int resolve_threads(std::optional<int> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("GSPCD_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1 && v <= 1 << 16)
            return static_cast<int>(v);
        throw UsageError("GSPCD_THREADS must be a positive integer, got '" +
                         std::string(env) + "'");
    }
    return 1;
}

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 0.5))
        throw UsageError("--alpha must be in [0, 0.5), got " + fmt6(alpha));
}

gspcd::EstimatorKind make_estimator(const std::string& name, double alpha,
                                    bool ar_centered) {
    if (name == "ar") return gspcd::EstimatorKind::ar(ar_centered);
    if (name == "trimmed") {
        check_alpha(alpha);
        return gspcd::EstimatorKind::trimmed(alpha);
    }
    if (name == "median") return gspcd::EstimatorKind::median();
    if (name == "mean") return gspcd::EstimatorKind::mean();
    if (name == "intensity") return gspcd::EstimatorKind::intensity_mean();
    throw UsageError("unknown estimator '" + name +
                     "' (expected ar|trimmed|median|mean|intensity)");
}

gspcd::ImageStack load_stack(const std::vector<std::string>& paths) {
    if (paths.size() < 2)
        throw UsageError("a stack needs at least 2 input rasters, got " +
                         std::to_string(paths.size()));
    std::vector<gspcd::Image> images;
    images.reserve(paths.size());
    for (const auto& p : paths) images.push_back(gspcd::read_raster(p));
    return gspcd::ImageStack(std::move(images));
}

std::string describe_line(const gspcd::Image& image) {
    try {
        const gspcd::DescriptiveStats s = gspcd::describe(image);
        return "average=" + fmt6(s.average) + " std_dev=" + fmt6(s.std_dev) +
               " skewness=" + fmt6(s.skewness) + " kurtosis=" + fmt6(s.kurtosis);
    } catch (const gspcd::ArgumentError&) {
        // constant image: mean/std still well defined
        const auto ms = gspcd::detail::sample_mean_stddev(image.pixels());
        return "average=" + fmt6(ms.mean) + " std_dev=" + fmt6(ms.std_dev) +
               " skewness=undefined kurtosis=undefined";
    }
}

double default_area_km2(const gspcd::Image& image) {
    const double m = image.pixel_spacing_m();
    return static_cast<double>(image.pixel_count()) * m * m / 1e6;
}

// ---------------------------------------------------------------------------
// gsp

struct GspOpts {
    std::vector<std::string> inputs;
    std::string out;
    std::string estimator = "median";
    double alpha = 0.3;
    bool ar_centered = false;
    std::optional<int> threads;
};

void run_gsp(const GspOpts& o) {
    const gspcd::EstimatorKind kind =
        make_estimator(o.estimator, o.alpha, o.ar_centered);
    const gspcd::ImageStack stack = load_stack(o.inputs);
    const gspcd::Image out =
        gspcd::predict_scene(stack, kind, resolve_threads(o.threads));
    gspcd::write_raster(out, o.out);
    std::cout << describe_line(out) << "\n";
}

// ---------------------------------------------------------------------------
// stats

struct StatsOpts {
    std::vector<std::string> images;
    std::string predicted;
    std::string targets;
    int half_window = 5;
    std::string out;
};

void run_stats(const StatsOpts& o) {
    std::string text = "path,average,std_dev,skewness,kurtosis\n";
    std::vector<gspcd::Image> loaded;
    for (const auto& p : o.images) {
        loaded.push_back(gspcd::read_raster(p));
        const gspcd::DescriptiveStats s = gspcd::describe(loaded.back());
        text += p + ',' + fmt6(s.average) + ',' + fmt6(s.std_dev) + ',' +
                fmt6(s.skewness) + ',' + fmt6(s.kurtosis) + '\n';
    }
    if (!o.predicted.empty()) {
        const gspcd::Image& interest = loaded.front();
        const gspcd::Image predicted = gspcd::read_raster(o.predicted);
        std::vector<gspcd::Target> targets;
        if (!o.targets.empty()) targets = gspcd::read_targets(o.targets);
        const gspcd::BinaryMask excluded = gspcd::exclusion_mask(
            targets, interest.rows(), interest.cols(), o.half_window);
        const gspcd::QualityMeasures q =
            gspcd::quality(interest, predicted, excluded);
        text += "interest,predicted,mse,mape,mdae,pixels_used\n";
        text += o.images.front() + ',' + o.predicted + ',' + fmt6(q.mse) + ',' +
                fmt6(q.mape) + ',' + fmt6(q.mdae) + ',' +
                std::to_string(q.pixels_used) + '\n';
    }
    std::cout << text;
    if (!o.out.empty()) {
        auto f = gspcd::detail::open_output(o.out, std::ios_base::out |
                                                       std::ios_base::trunc);
        f << text;
        if (!f) throw gspcd::IoError("failed writing '" + o.out + "'");
    }
}

// ---------------------------------------------------------------------------
// detect

struct DetectOpts {
    std::string surveillance;
    std::string reference;
    double c_constant = 5.0;
    int opening = 3;
    int dilation = 7;
    int connectivity = 8;
    std::string out;
};

gspcd::CdaParams cda_params(double c, int opening, int dilation,
                            int connectivity) {
    gspcd::CdaParams p;
    p.c_constant = c;
    p.opening_kernel = opening;
    p.dilation_kernel = dilation;
    p.connectivity = connectivity;
    try {
        p.validate();
    } catch (const gspcd::ArgumentError& e) {
        throw UsageError(e.what());
    }
    return p;
}

void run_detect(const DetectOpts& o) {
    const gspcd::CdaParams params =
        cda_params(o.c_constant, o.opening, o.dilation, o.connectivity);
    const gspcd::Image surveillance = gspcd::read_raster(o.surveillance);
    const gspcd::Image reference = gspcd::read_raster(o.reference);
    const double c = params.c_constant;
    const auto sweep =
        gspcd::detect_sweep(surveillance, reference, params, std::span(&c, 1));
    gspcd::write_detections(sweep.front().detections, o.out);
    std::cout << "detections=" << sweep.front().detections.size()
              << " lambda=" << fmt6(sweep.front().threshold.lambda) << "\n";
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOpts {
    std::string detections;
    std::string targets;
    double radius = 10.0;
    double area = 0.0;
    std::string mission = "0";
    std::string pass = "0";
    std::string out;
};

void run_evaluate(const EvaluateOpts& o) {
    const auto detections = gspcd::read_detections(o.detections);
    const auto targets = gspcd::read_targets(o.targets);
    if (targets.empty())
        throw UsageError("targets file '" + o.targets + "' lists no targets");
    const gspcd::MatchResult mr = gspcd::match(detections, targets, o.radius);
    const gspcd::Score s =
        gspcd::score(mr, static_cast<std::int64_t>(targets.size()), o.area);
    std::cout << "known=" << targets.size()
              << " detected=" << mr.matched_pairs.size() << " pd=" << fmt6(s.pd)
              << " false_alarms=" << mr.false_alarms.size()
              << " far=" << fmt6(s.far) << "\n";
    if (!o.out.empty()) {
        auto f = gspcd::detail::open_output(o.out, std::ios_base::out |
                                                       std::ios_base::trunc);
        f << "mission,pass,known,detected,pd,false_alarms\n"
          << o.mission << ',' << o.pass << ',' << targets.size() << ','
          << mr.matched_pairs.size() << ',' << fmt6(s.pd) << ','
          << mr.false_alarms.size() << '\n';
        if (!f) throw gspcd::IoError("failed writing '" + o.out + "'");
    }
}

// ---------------------------------------------------------------------------
// roc

struct RocCaseSpec {
    std::string mission;
    std::string pass;
    fs::path surveillance;
    fs::path reference;
    fs::path targets;
};

// Case list: one `mission,pass,surveillance,reference,targets` record per
// line; relative paths resolve against the list file's directory.
std::vector<RocCaseSpec> parse_cases_file(const fs::path& path) {
    auto in = gspcd::detail::open_input(path, std::ios_base::in);
    const fs::path base = path.parent_path();
    const auto resolve = [&base](std::string_view field) {
        fs::path p{std::string(field)};
        return p.is_absolute() || base.empty() ? p : base / p;
    };
    std::vector<RocCaseSpec> cases;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view t = gspcd::detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = gspcd::detail::split(t, ',');
        if (fields.size() != 5)
            throw gspcd::FormatError(
                "cases '" + path.string() + "' line " + std::to_string(line_no) +
                ": expected 'mission,pass,surveillance,reference,targets'");
        RocCaseSpec spec;
        spec.mission = std::string(gspcd::detail::trim(fields[0]));
        spec.pass = std::string(gspcd::detail::trim(fields[1]));
        spec.surveillance = resolve(gspcd::detail::trim(fields[2]));
        spec.reference = resolve(gspcd::detail::trim(fields[3]));
        spec.targets = resolve(gspcd::detail::trim(fields[4]));
        cases.push_back(std::move(spec));
    }
    return cases;
}

struct RocOpts {
    std::string cases;
    std::vector<double> c_values;
    double radius = 10.0;
    std::optional<double> area_per_image;
    int opening = 3;
    int dilation = 7;
    int connectivity = 8;
    std::string out_dir = ".";
};

struct CaseRow {
    std::string mission;
    std::string pass;
    std::int64_t known = 0;
    std::int64_t detected = 0;
    double pd = 0.0;
    std::int64_t false_alarms = 0;
};

void write_case_table(const std::vector<CaseRow>& rows, const fs::path& path) {
    auto f = gspcd::detail::open_output(path, std::ios_base::out |
                                                  std::ios_base::trunc);
    f << "mission,pass,known,detected,pd,false_alarms\n";
    for (const CaseRow& r : rows)
        f << r.mission << ',' << r.pass << ',' << r.known << ',' << r.detected
          << ',' << fmt6(r.pd) << ',' << r.false_alarms << '\n';
    if (!f) throw gspcd::IoError("failed writing '" + path.string() + "'");
}

std::vector<double> c_values_or_default(std::vector<double> values) {
    if (values.empty()) return {2.0, 3.0, 4.0, 5.0, 6.0};
    return values;
}

void print_roc(const gspcd::RocTable& table) {
    for (const auto& r : table.rows)
        std::cout << "C=" << gspcd::format_double(r.c_constant)
                  << " detected=" << r.detected << "/" << r.known
                  << " pd=" << fmt6(r.pd) << " false_alarms=" << r.false_alarms
                  << " far=" << fmt6(r.far) << "\n";
}

void run_roc(const RocOpts& o) {
    const auto specs = parse_cases_file(o.cases);
    if (specs.empty())
        throw UsageError("case list '" + o.cases + "' contains no cases");
    const std::vector<double> c_values = c_values_or_default(o.c_values);
    const gspcd::CdaParams params =
        cda_params(c_values.front() > 0 ? c_values.front() : 5.0, o.opening,
                   o.dilation, o.connectivity);
    fs::create_directories(o.out_dir);

    gspcd::RocAccumulator acc(c_values);
    std::vector<std::vector<CaseRow>> case_rows(c_values.size());
    double area_per_image = 0.0;
    for (const RocCaseSpec& spec : specs) {
        const gspcd::Image surveillance = gspcd::read_raster(spec.surveillance);
        const gspcd::Image reference = gspcd::read_raster(spec.reference);
        const auto targets = gspcd::read_targets(spec.targets);
        if (area_per_image == 0.0)
            area_per_image = o.area_per_image.value_or(
                default_area_km2(surveillance));
        const auto points =
            gspcd::detect_sweep(surveillance, reference, params, c_values);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const gspcd::MatchResult mr =
                gspcd::match(points[i].detections, targets, o.radius);
            const auto known = static_cast<std::int64_t>(targets.size());
            const auto detected =
                static_cast<std::int64_t>(mr.matched_pairs.size());
            const auto fa = static_cast<std::int64_t>(mr.false_alarms.size());
            acc.add_case(i, points[i].threshold.lambda, known, detected, fa);
            case_rows[i].push_back(
                {spec.mission, spec.pass, known, detected,
                 known > 0 ? static_cast<double>(detected) / known : 0.0, fa});
        }
    }
    const gspcd::RocTable table =
        acc.finish(static_cast<double>(specs.size()) * area_per_image);
    gspcd::write_roc(table, fs::path(o.out_dir) / "roc.csv");
    for (std::size_t i = 0; i < c_values.size(); ++i)
        write_case_table(case_rows[i],
                         fs::path(o.out_dir) /
                             ("cases_c" + gspcd::format_double(c_values[i]) +
                              ".csv"));
    print_roc(table);
}

// ---------------------------------------------------------------------------
// synth

struct SynthOpts {
    std::string out_dir;
    bool default_scenario = false;
    std::uint64_t seed = 42;
    int rows = 0;
    int cols = 0;
    int n_images = 8;
    double clutter_mean = 0.14;
    double clutter_std = 0.07;
    double correlation = 3.0;
    double jitter = 0.01;
    double spacing = gspcd::kDefaultPixelSpacingM;
    std::string targets_file;
};

// Synthetic target list: `image_index,row,col[,size_px[,amplitude_boost]]`.
std::vector<gspcd::SynthTarget> parse_synth_targets(const fs::path& path) {
    auto in = gspcd::detail::open_input(path, std::ios_base::in);
    std::vector<gspcd::SynthTarget> targets;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view t = gspcd::detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = gspcd::detail::split(t, ',');
        const std::string where = "synthetic targets '" + path.string() +
                                  "' line " + std::to_string(line_no);
        if (fields.size() < 3 || fields.size() > 5)
            throw gspcd::FormatError(
                where + ": expected 'image_index,row,col[,size_px[,boost]]'");
        gspcd::SynthTarget st;
        st.image_index =
            static_cast<int>(gspcd::detail::parse_int(fields[0], where));
        st.row = gspcd::detail::parse_double(fields[1], where);
        st.col = gspcd::detail::parse_double(fields[2], where);
        if (fields.size() >= 4)
            st.size_px =
                static_cast<int>(gspcd::detail::parse_int(fields[3], where));
        if (fields.size() == 5)
            st.amplitude_boost = gspcd::detail::parse_double(fields[4], where);
        targets.push_back(st);
    }
    return targets;
}

gspcd::SynthConfig synth_config(const SynthOpts& o) {
    if (o.default_scenario) return gspcd::SynthConfig::default_scenario(o.seed);
    if (o.rows < 1 || o.cols < 1)
        throw UsageError("synth needs --rows and --cols (or --default-scenario)");
    gspcd::SynthConfig c;
    c.rows = o.rows;
    c.cols = o.cols;
    c.n_images = o.n_images;
    c.seed = o.seed;
    c.clutter_mean = o.clutter_mean;
    c.clutter_std = o.clutter_std;
    c.clutter_correlation_px = o.correlation;
    c.temporal_jitter_std = o.jitter;
    c.pixel_spacing_m = o.spacing;
    if (!o.targets_file.empty()) c.targets = parse_synth_targets(o.targets_file);
    return c;
}

std::string index_name(const char* prefix, std::size_t i, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%02zu%s", prefix, i, suffix);
    return buf;
}

// Writes stack_NN.f32/.hdr, targets_NN.csv, and clutter_truth.f32.
void write_scene(const gspcd::SynthScene& scene, const fs::path& dir) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < scene.stack.size(); ++i) {
        gspcd::write_raster(scene.stack[i], dir / index_name("stack_", i, ".f32"));
        gspcd::write_targets(scene.targets_per_image[i],
                             dir / index_name("targets_", i, ".csv"));
    }
    gspcd::write_raster(scene.clutter, dir / "clutter_truth.f32");
}

void run_synth(const SynthOpts& o) {
    const gspcd::SynthConfig config = synth_config(o);
    const gspcd::SynthScene scene = gspcd::generate(config);
    write_scene(scene, o.out_dir);
    std::cout << "wrote " << scene.stack.size() << " stack images ("
              << config.rows << "x" << config.cols << ") to " << o.out_dir
              << "\n";
}

// ---------------------------------------------------------------------------
// pipeline

struct PipelineOpts {
    std::string out_dir;
    bool synth_default = false;
    std::uint64_t seed = 42;
    std::vector<std::string> stack;
    std::string surveillance;
    std::string targets;
    std::string estimator = "median";
    double alpha = 0.3;
    bool ar_centered = false;
    std::vector<double> c_values;
    double radius = 10.0;
    std::optional<double> area;
    int opening = 3;
    int dilation = 7;
    int connectivity = 8;
    int half_window = 5;
    std::optional<int> threads;
};

void run_pipeline(const PipelineOpts& o) {
    const gspcd::EstimatorKind kind =
        make_estimator(o.estimator, o.alpha, o.ar_centered);
    const std::vector<double> c_values = c_values_or_default(o.c_values);
    const gspcd::CdaParams params =
        cda_params(c_values.front() > 0 ? c_values.front() : 5.0, o.opening,
                   o.dilation, o.connectivity);
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);

    // stage 1: acquire the stack, the surveillance image, and ground truth
    std::optional<gspcd::ImageStack> stack;
    std::optional<gspcd::Image> surveillance;
    std::vector<gspcd::Target> targets;
    std::string case_label = "ingest";
    if (o.synth_default) {
        gspcd::SynthScene scene =
            gspcd::generate(gspcd::SynthConfig::default_scenario(o.seed));
        write_scene(scene, dir);
        surveillance = scene.stack[0];
        targets = scene.targets_per_image[0];
        stack = std::move(scene.stack);
        case_label = "synth";
    } else {
        if (o.stack.size() < 2 || o.surveillance.empty() || o.targets.empty())
            throw UsageError(
                "pipeline needs --synth-default, or --stack (>= 2 rasters) with "
                "--surveillance and --targets");
        stack = load_stack(o.stack);
        surveillance = gspcd::read_raster(o.surveillance);
        targets = gspcd::read_targets(o.targets);
    }

    // stage 2: ground scene prediction
    const gspcd::Image reference =
        gspcd::predict_scene(*stack, kind, resolve_threads(o.threads));
    const std::string gsp_name = std::string("gsp_") + kind.name() + ".f32";
    gspcd::write_raster(reference, dir / gsp_name);
    std::cout << "gsp (" << kind.name() << "): " << describe_line(reference)
              << "\n";

    // stage 3: prediction quality against the surveillance image
    {
        const gspcd::BinaryMask excluded = gspcd::exclusion_mask(
            targets, surveillance->rows(), surveillance->cols(), o.half_window);
        const gspcd::QualityMeasures q =
            gspcd::quality(*surveillance, reference, excluded);
        auto f = gspcd::detail::open_output(
            dir / "stats.csv", std::ios_base::out | std::ios_base::trunc);
        f << "image,average,std_dev,skewness,kurtosis\n";
        const auto stat_row = [&f](const std::string& name,
                                   const gspcd::Image& im) {
            try {
                const auto s = gspcd::describe(im);
                f << name << ',' << fmt6(s.average) << ',' << fmt6(s.std_dev)
                  << ',' << fmt6(s.skewness) << ',' << fmt6(s.kurtosis) << '\n';
            } catch (const gspcd::ArgumentError&) {
                const auto ms = gspcd::detail::sample_mean_stddev(im.pixels());
                f << name << ',' << fmt6(ms.mean) << ',' << fmt6(ms.std_dev)
                  << ",undefined,undefined\n";
            }
        };
        stat_row("surveillance", *surveillance);
        stat_row(gsp_name, reference);
        f << "interest,predicted,mse,mape,mdae,pixels_used\n";
        f << "surveillance," << gsp_name << ',' << fmt6(q.mse) << ','
          << fmt6(q.mape) << ',' << fmt6(q.mdae) << ',' << q.pixels_used << '\n';
        if (!f)
            throw gspcd::IoError("failed writing '" +
                                 (dir / "stats.csv").string() + "'");
        std::cout << "quality: mse=" << fmt6(q.mse) << " mape=" << fmt6(q.mape)
                  << " mdae=" << fmt6(q.mdae) << "\n";
    }

    // stage 4: detection sweep, per-C artifacts, aggregate ROC table
    const double area =
        o.area.value_or(default_area_km2(*surveillance));
    const auto points =
        gspcd::detect_sweep(*surveillance, reference, params, c_values);
    gspcd::RocAccumulator acc(c_values);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const gspcd::MatchResult mr =
            gspcd::match(points[i].detections, targets, o.radius);
        const auto known = static_cast<std::int64_t>(targets.size());
        const auto detected = static_cast<std::int64_t>(mr.matched_pairs.size());
        const auto fa = static_cast<std::int64_t>(mr.false_alarms.size());
        acc.add_case(i, points[i].threshold.lambda, known, detected, fa);
        const std::string c_tag = gspcd::format_double(c_values[i]);
        gspcd::write_detections(points[i].detections,
                                dir / ("detections_c" + c_tag + ".csv"));
        write_case_table(
            {{case_label, "0", known, detected,
              known > 0 ? static_cast<double>(detected) / known : 0.0, fa}},
            dir / ("cases_c" + c_tag + ".csv"));
    }
    const gspcd::RocTable table = acc.finish(area);
    gspcd::write_roc(table, dir / "roc.csv");
    print_roc(table);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Ground scene prediction and change detection for stacks of "
        "co-registered SAR amplitude rasters"};
    app.require_subcommand(1);

    GspOpts gsp;
    auto* gsp_cmd = app.add_subcommand(
        "gsp", "Predict the static ground scene from an image stack");
    gsp_cmd->add_option("inputs", gsp.inputs, "Input rasters (.f32)")
        ->required()
        ->expected(-1);
    gsp_cmd->add_option("--out", gsp.out, "Output raster path")->required();
    gsp_cmd->add_option("--est", gsp.estimator,
                        "Estimator: ar|trimmed|median|mean|intensity");
    gsp_cmd->add_option("--alpha", gsp.alpha, "Trim fraction for --est trimmed");
    gsp_cmd->add_flag("--ar-centered", gsp.ar_centered,
                      "Fit the AR model on mean-centered samples");
    gsp_cmd->add_option("--threads", gsp.threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    gsp_cmd->callback([&gsp] { run_gsp(gsp); });

    StatsOpts stats;
    auto* stats_cmd = app.add_subcommand(
        "stats", "Descriptive statistics and prediction quality measures");
    stats_cmd->add_option("images", stats.images, "Rasters to describe")
        ->required()
        ->expected(-1);
    stats_cmd->add_option("--predicted", stats.predicted,
                          "Predicted raster compared against the first image");
    stats_cmd->add_option("--targets", stats.targets,
                          "Target CSV whose regions are excluded from quality");
    stats_cmd->add_option("--half-window", stats.half_window,
                          "Half side of the excluded square per target")
        ->check(CLI::NonNegativeNumber);
    stats_cmd->add_option("--out", stats.out, "Also write the CSV rows here");
    stats_cmd->callback([&stats] { run_stats(stats); });

    DetectOpts detect;
    auto* detect_cmd = app.add_subcommand(
        "detect", "Difference, threshold, morphology, component extraction");
    detect_cmd
        ->add_option("--surveillance", detect.surveillance, "Surveillance raster")
        ->required();
    detect_cmd->add_option("--reference", detect.reference, "Reference raster")
        ->required();
    detect_cmd->add_option("-c,--c-constant", detect.c_constant,
                           "Threshold constant C")
        ->required()
        ->check(CLI::PositiveNumber);
    detect_cmd->add_option("--opening", detect.opening, "Opening kernel (odd)");
    detect_cmd->add_option("--dilation", detect.dilation, "Dilation kernel (odd)");
    detect_cmd->add_option("--connectivity", detect.connectivity,
                           "Component connectivity")
        ->check(CLI::IsMember({4, 8}));
    detect_cmd->add_option("--out", detect.out, "Detections CSV path")->required();
    detect_cmd->callback([&detect] { run_detect(detect); });

    EvaluateOpts evaluate;
    auto* eval_cmd = app.add_subcommand(
        "evaluate", "Score a detections CSV against ground-truth targets");
    eval_cmd->add_option("--detections", evaluate.detections, "Detections CSV")
        ->required();
    eval_cmd->add_option("--targets", evaluate.targets, "Targets CSV")
        ->required();
    eval_cmd->add_option("--radius", evaluate.radius, "Match radius in pixels")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--area", evaluate.area, "Imaged area in km^2")
        ->required()
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--mission", evaluate.mission, "Case label column 1");
    eval_cmd->add_option("--pass", evaluate.pass, "Case label column 2");
    eval_cmd->add_option("--out", evaluate.out, "Per-case CSV path");
    eval_cmd->callback([&evaluate] { run_evaluate(evaluate); });

    RocOpts roc;
    auto* roc_cmd = app.add_subcommand(
        "roc", "Sweep C over a case list and tabulate Pd versus FAR");
    roc_cmd->add_option("--cases", roc.cases, "Case list file")->required();
    roc_cmd->add_option("--c", roc.c_values,
                        "C values (default 2 3 4 5 6)");
    roc_cmd->add_option("--radius", roc.radius, "Match radius in pixels")
        ->check(CLI::PositiveNumber);
    roc_cmd->add_option("--area-per-image", roc.area_per_image,
                        "Imaged area per case in km^2 (default: from raster)")
        ->check(CLI::PositiveNumber);
    roc_cmd->add_option("--opening", roc.opening, "Opening kernel (odd)");
    roc_cmd->add_option("--dilation", roc.dilation, "Dilation kernel (odd)");
    roc_cmd->add_option("--connectivity", roc.connectivity,
                        "Component connectivity")
        ->check(CLI::IsMember({4, 8}));
    roc_cmd->add_option("--out-dir", roc.out_dir, "Output directory");
    roc_cmd->callback([&roc] { run_roc(roc); });

    SynthOpts synth;
    auto* synth_cmd = app.add_subcommand(
        "synth", "Generate a deterministic synthetic stack with ground truth");
    synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")
        ->required();
    synth_cmd->add_flag("--default-scenario", synth.default_scenario,
                        "300x200 scene, stack of 8, 25 targets in images 0-1");
    synth_cmd->add_option("--seed", synth.seed, "Generator seed");
    synth_cmd->add_option("--rows", synth.rows, "Scene rows");
    synth_cmd->add_option("--cols", synth.cols, "Scene cols");
    synth_cmd->add_option("--n-images", synth.n_images, "Stack size");
    synth_cmd->add_option("--clutter-mean", synth.clutter_mean, "Clutter mean");
    synth_cmd->add_option("--clutter-std", synth.clutter_std, "Clutter std");
    synth_cmd->add_option("--correlation", synth.correlation,
                          "Clutter smoothing radius in pixels");
    synth_cmd->add_option("--jitter", synth.jitter,
                          "Per-image temporal jitter std");
    synth_cmd->add_option("--spacing", synth.spacing, "Pixel spacing in meters")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--targets-file", synth.targets_file,
                          "Synthetic target list CSV");
    synth_cmd->callback([&synth] { run_synth(synth); });

    PipelineOpts pipeline;
    auto* pipe_cmd = app.add_subcommand(
        "pipeline", "synth/ingest -> gsp -> detect -> evaluate, all artifacts");
    pipe_cmd->add_option("--out-dir", pipeline.out_dir, "Output directory")
        ->required();
    pipe_cmd->add_flag("--synth-default", pipeline.synth_default,
                       "Use the built-in synthetic scenario as input");
    pipe_cmd->add_option("--seed", pipeline.seed, "Synthetic scenario seed");
    pipe_cmd->add_option("--stack", pipeline.stack, "Input stack rasters");
    pipe_cmd->add_option("--surveillance", pipeline.surveillance,
                         "Surveillance raster");
    pipe_cmd->add_option("--targets", pipeline.targets, "Targets CSV");
    pipe_cmd->add_option("--est", pipeline.estimator,
                         "Estimator: ar|trimmed|median|mean|intensity");
    pipe_cmd->add_option("--alpha", pipeline.alpha,
                         "Trim fraction for --est trimmed");
    pipe_cmd->add_flag("--ar-centered", pipeline.ar_centered,
                       "Fit the AR model on mean-centered samples");
    pipe_cmd->add_option("--c", pipeline.c_values, "C values (default 2 3 4 5 6)");
    pipe_cmd->add_option("--radius", pipeline.radius, "Match radius in pixels")
        ->check(CLI::PositiveNumber);
    pipe_cmd->add_option("--area", pipeline.area,
                         "Imaged area in km^2 (default: from raster)")
        ->check(CLI::PositiveNumber);
    pipe_cmd->add_option("--opening", pipeline.opening, "Opening kernel (odd)");
    pipe_cmd->add_option("--dilation", pipeline.dilation,
                         "Dilation kernel (odd)");
    pipe_cmd->add_option("--connectivity", pipeline.connectivity,
                         "Component connectivity")
        ->check(CLI::IsMember({4, 8}));
    pipe_cmd->add_option("--half-window", pipeline.half_window,
                         "Quality exclusion half window")
        ->check(CLI::NonNegativeNumber);
    pipe_cmd->add_option("--threads", pipeline.threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    pipe_cmd->callback([&pipeline] { run_pipeline(pipeline); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const gspcd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
