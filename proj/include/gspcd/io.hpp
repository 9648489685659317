#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gspcd/core.hpp"
#include "gspcd/eval.hpp"

namespace gspcd {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                          s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                          s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(s.substr(start));
            break;
        }
        fields.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline double parse_double(std::string_view s, const std::string& context) {
    s = trim(s);
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw FormatError(context + ": expected a number, got '" +
                          std::string(s) + "'");
    return value;
}

inline std::int64_t parse_int(std::string_view s, const std::string& context) {
    s = trim(s);
    std::int64_t value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw FormatError(context + ": expected an integer, got '" +
                          std::string(s) + "'");
    return value;
}

inline std::ofstream open_output(const std::filesystem::path& path,
                                 std::ios_base::openmode mode) {
    std::ofstream out(path, mode);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

inline std::ifstream open_input(const std::filesystem::path& path,
                                std::ios_base::openmode mode) {
    std::ifstream in(path, mode);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

}  // namespace detail

/// Sidecar description of a raw raster payload. The payload is always raw
/// 32-bit IEEE-754 little-endian floats, row-major.
struct RasterHeader {
    int rows = 0;
    int cols = 0;
    double pixel_spacing_m = kDefaultPixelSpacingM;
};

/// Derives the companion header path: `scene.f32` -> `scene.hdr`.
inline std::filesystem::path header_path_for(const std::filesystem::path& data_path) {
    std::filesystem::path p = data_path;
    p.replace_extension(".hdr");
    return p;
}

inline RasterHeader read_raster_header(const std::filesystem::path& header_path) {
    std::ifstream in = detail::open_input(header_path, std::ios_base::in);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string_view::npos)
            throw FormatError("raster header '" + header_path.string() +
                              "': line without key=value: '" + std::string(t) + "'");
        kv[std::string(detail::trim(t.substr(0, eq)))] =
            std::string(detail::trim(t.substr(eq + 1)));
    }
    const auto require = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw FormatError("raster header '" + header_path.string() +
                              "': missing key '" + key + "'");
        return it->second;
    };
    const auto dimension = [&](const char* key) {
        const std::int64_t v = detail::parse_int(
            require(key), "raster header '" + header_path.string() + "' " + key);
        if (v < 1 || v > 1'000'000)
            throw FormatError("raster header '" + header_path.string() + "': " +
                              key + " = " + std::to_string(v) +
                              " outside [1, 1000000]");
        return static_cast<int>(v);
    };
    RasterHeader h;
    h.rows = dimension("rows");
    h.cols = dimension("cols");
    h.pixel_spacing_m = detail::parse_double(
        require("pixel_spacing_m"),
        "raster header '" + header_path.string() + "' pixel_spacing_m");
    if (!(h.pixel_spacing_m > 0.0))
        throw FormatError("raster header '" + header_path.string() +
                          "': pixel_spacing_m must be positive");
    if (const auto it = kv.find("dtype"); it != kv.end() && it->second != "float32")
        throw FormatError("raster header '" + header_path.string() +
                          "': unsupported dtype '" + it->second + "'");
    if (const auto it = kv.find("byte_order");
        it != kv.end() && it->second != "little")
        throw FormatError("raster header '" + header_path.string() +
                          "': unsupported byte_order '" + it->second + "'");
    return h;
}

/// Reads a `.f32` payload plus its `key=value` text header. The payload byte
/// length must equal rows*cols*4 exactly; any non-finite pixel is an error.
inline Image read_raster(const std::filesystem::path& data_path,
                         const std::filesystem::path& header_path) {
    const RasterHeader h = read_raster_header(header_path);
    const std::size_t expected =
        static_cast<std::size_t>(h.rows) * static_cast<std::size_t>(h.cols) * 4u;

    std::error_code ec;
    const auto actual = std::filesystem::file_size(data_path, ec);
    if (ec)
        throw IoError("cannot stat '" + data_path.string() + "': " + ec.message());
    if (actual != expected)
        throw FormatError("raster '" + data_path.string() + "': payload is " +
                          std::to_string(actual) + " bytes, header implies " +
                          std::to_string(expected));

    std::ifstream in = detail::open_input(data_path, std::ios_base::binary);
    std::vector<unsigned char> bytes(expected);
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(expected));
    if (in.gcount() != static_cast<std::streamsize>(expected))
        throw IoError("raster '" + data_path.string() + "': short read");

    std::vector<float> pixels(expected / 4);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const std::uint32_t u = static_cast<std::uint32_t>(bytes[4 * i]) |
                                (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                                (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                                (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
        pixels[i] = std::bit_cast<float>(u);
        if (!std::isfinite(pixels[i]))
            throw DataError("raster '" + data_path.string() +
                            "': non-finite pixel at index " + std::to_string(i));
    }
    return Image(h.rows, h.cols, std::move(pixels), h.pixel_spacing_m);
}

/// Convenience overload using the derived `.hdr` path.
inline Image read_raster(const std::filesystem::path& data_path) {
    return read_raster(data_path, header_path_for(data_path));
}

inline void write_raster(const Image& image,
                         const std::filesystem::path& data_path,
                         const std::filesystem::path& header_path) {
    {
        std::ofstream hdr = detail::open_output(header_path, std::ios_base::out |
                                                                 std::ios_base::trunc);
        hdr << "rows=" << image.rows() << "\n"
            << "cols=" << image.cols() << "\n"
            << "dtype=float32\n"
            << "byte_order=little\n"
            << "pixel_spacing_m=" << format_double(image.pixel_spacing_m()) << "\n";
        if (!hdr)
            throw IoError("failed writing raster header '" + header_path.string() + "'");
    }
    std::ofstream out = detail::open_output(
        data_path, std::ios_base::binary | std::ios_base::trunc);
    const auto px = image.pixels();
    std::vector<unsigned char> bytes(px.size() * 4);
    for (std::size_t i = 0; i < px.size(); ++i) {
        const std::uint32_t u = std::bit_cast<std::uint32_t>(px[i]);
        bytes[4 * i] = static_cast<unsigned char>(u & 0xFF);
        bytes[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xFF);
        bytes[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xFF);
        bytes[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("failed writing raster payload '" + data_path.string() + "'");
}

inline void write_raster(const Image& image,
                         const std::filesystem::path& data_path) {
    write_raster(image, data_path, header_path_for(data_path));
}

/// Targets are `id,row,col` records; blank lines and lines starting with `#`
/// are ignored. Ids must not contain commas.
inline std::vector<Target> read_targets(const std::filesystem::path& path) {
    std::ifstream in = detail::open_input(path, std::ios_base::in);
    std::vector<Target> targets;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = detail::split(t, ',');
        const std::string where =
            "targets '" + path.string() + "' line " + std::to_string(line_no);
        if (fields.size() != 3)
            throw FormatError(where + ": expected 'id,row,col', got " +
                              std::to_string(fields.size()) + " fields");
        Target target;
        target.id = std::string(detail::trim(fields[0]));
        if (target.id.empty())
            throw FormatError(where + ": empty target id");
        target.row = detail::parse_double(fields[1], where + " row");
        target.col = detail::parse_double(fields[2], where + " col");
        targets.push_back(std::move(target));
    }
    return targets;
}

inline void write_targets(std::span<const Target> targets,
                          const std::filesystem::path& path) {
    std::ofstream out = detail::open_output(path, std::ios_base::out |
                                                      std::ios_base::trunc);
    out << "# id,row,col\n";
    for (const Target& t : targets)
        out << t.id << ',' << format_double(t.row) << ',' << format_double(t.col)
            << '\n';
    if (!out)
        throw IoError("failed writing targets '" + path.string() + "'");
}

inline constexpr const char* kDetectionsCsvHeader =
    "centroid_row,centroid_col,pixel_count,min_row,min_col,max_row,max_col";

inline void write_detections(std::span<const Detection> detections,
                             const std::filesystem::path& path) {
    std::ofstream out = detail::open_output(path, std::ios_base::out |
                                                      std::ios_base::trunc);
    out << kDetectionsCsvHeader << '\n';
    for (const Detection& d : detections)
        out << format_double(d.centroid_row) << ',' << format_double(d.centroid_col)
            << ',' << d.pixel_count << ',' << d.min_row << ',' << d.min_col << ','
            << d.max_row << ',' << d.max_col << '\n';
    if (!out)
        throw IoError("failed writing detections '" + path.string() + "'");
}

inline std::vector<Detection> read_detections(const std::filesystem::path& path) {
    std::ifstream in = detail::open_input(path, std::ios_base::in);
    std::string line;
    if (!std::getline(in, line) ||
        detail::trim(line) != std::string_view(kDetectionsCsvHeader))
        throw FormatError("detections '" + path.string() +
                          "': missing or unexpected header line");
    std::vector<Detection> detections;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = detail::split(t, ',');
        const std::string where =
            "detections '" + path.string() + "' line " + std::to_string(line_no);
        if (fields.size() != 7)
            throw FormatError(where + ": expected 7 fields, got " +
                              std::to_string(fields.size()));
        Detection d;
        d.centroid_row = detail::parse_double(fields[0], where);
        d.centroid_col = detail::parse_double(fields[1], where);
        d.pixel_count = detail::parse_int(fields[2], where);
        d.min_row = static_cast<int>(detail::parse_int(fields[3], where));
        d.min_col = static_cast<int>(detail::parse_int(fields[4], where));
        d.max_row = static_cast<int>(detail::parse_int(fields[5], where));
        d.max_col = static_cast<int>(detail::parse_int(fields[6], where));
        if (d.pixel_count < 1)
            throw DataError(where + ": pixel_count must be >= 1");
        if (d.min_row > d.max_row || d.min_col > d.max_col ||
            d.centroid_row < d.min_row || d.centroid_row > d.max_row ||
            d.centroid_col < d.min_col || d.centroid_col > d.max_col)
            throw DataError(where + ": centroid outside the bounding box");
        detections.push_back(d);
    }
    return detections;
}

inline constexpr const char* kRocCsvHeader =
    "C,lambda,detected,known,Pd,false_alarms,area_km2,FAR";

/// Emits one CSV row per C value. Reals use shortest round-trip decimal form
/// with '.' as the decimal separator regardless of locale.
inline void write_roc(const RocTable& table, const std::filesystem::path& path) {
    if (table.rows.empty())
        throw ArgumentError("write_roc: empty table");
    std::ofstream out = detail::open_output(path, std::ios_base::out |
                                                      std::ios_base::trunc);
    out << kRocCsvHeader << '\n';
    for (const RocRow& r : table.rows)
        out << format_double(r.c_constant) << ',' << format_double(r.lambda) << ','
            << r.detected << ',' << r.known << ',' << format_double(r.pd) << ','
            << r.false_alarms << ',' << format_double(r.area_km2) << ','
            << format_double(r.far) << '\n';
    if (!out)
        throw IoError("failed writing ROC table '" + path.string() + "'");
}

inline RocTable read_roc(const std::filesystem::path& path) {
    std::ifstream in = detail::open_input(path, std::ios_base::in);
    std::string line;
    if (!std::getline(in, line) ||
        detail::trim(line) != std::string_view(kRocCsvHeader))
        throw FormatError("ROC table '" + path.string() +
                          "': missing or unexpected header line");
    RocTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = detail::split(t, ',');
        const std::string where =
            "ROC table '" + path.string() + "' line " + std::to_string(line_no);
        if (fields.size() != 8)
            throw FormatError(where + ": expected 8 fields, got " +
                              std::to_string(fields.size()));
        RocRow r;
        r.c_constant = detail::parse_double(fields[0], where);
        r.lambda = detail::parse_double(fields[1], where);
        r.detected = detail::parse_int(fields[2], where);
        r.known = detail::parse_int(fields[3], where);
        r.pd = detail::parse_double(fields[4], where);
        r.false_alarms = detail::parse_int(fields[5], where);
        r.area_km2 = detail::parse_double(fields[6], where);
        r.far = detail::parse_double(fields[7], where);
        table.rows.push_back(r);
    }
    return table;
}

}  // namespace gspcd
