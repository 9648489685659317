#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gspcd {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArgumentError : Error { using Error::Error; };
struct BoundsError : Error { using Error::Error; };
// Content violates a value invariant (e.g. non-finite amplitude).
struct DataError : Error { using Error::Error; };
// On-disk layout or syntax problems.
struct FormatError : Error { using Error::Error; };
// Filesystem-level failures.
struct IoError : Error { using Error::Error; };

inline constexpr double kDefaultPixelSpacingM = 2.5;

/// Single-channel amplitude raster. Flat row-major storage, origin at the
/// top-left, coordinates are (row, col). Pixels are validated finite at
/// construction and the object is immutable afterwards, so instances can be
/// shared freely across worker threads.
class Image {
public:
    Image(int rows, int cols, float fill = 0.0f,
          double pixel_spacing_m = kDefaultPixelSpacingM)
        : Image(rows, cols, std::vector<float>(checked_size(rows, cols), fill),
                pixel_spacing_m) {}

    Image(int rows, int cols, std::vector<float> pixels,
          double pixel_spacing_m = kDefaultPixelSpacingM)
        : rows_(rows), cols_(cols), spacing_(pixel_spacing_m),
          pixels_(std::move(pixels)) {
        if (rows_ <= 0 || cols_ <= 0)
            throw ArgumentError("Image: rows and cols must be positive");
        if (!(spacing_ > 0.0))
            throw ArgumentError("Image: pixel_spacing_m must be positive");
        if (pixels_.size() != checked_size(rows_, cols_))
            throw ArgumentError("Image: pixel buffer has " +
                                std::to_string(pixels_.size()) +
                                " values, expected rows*cols = " +
                                std::to_string(checked_size(rows_, cols_)));
        for (std::size_t i = 0; i < pixels_.size(); ++i)
            if (!std::isfinite(pixels_[i]))
                throw DataError("Image: non-finite pixel at index " +
                                std::to_string(i));
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double pixel_spacing_m() const { return spacing_; }
    std::size_t pixel_count() const { return pixels_.size(); }

    bool in_bounds(int r, int c) const {
        return r >= 0 && r < rows_ && c >= 0 && c < cols_;
    }

    float at(int r, int c) const {
        if (!in_bounds(r, c))
            throw BoundsError("Image: coordinate (" + std::to_string(r) + ", " +
                              std::to_string(c) + ") outside " +
                              std::to_string(rows_) + "x" + std::to_string(cols_));
        return pixels_[index(r, c)];
    }

    /// Unchecked access for hot loops.
    float operator()(int r, int c) const { return pixels_[index(r, c)]; }

    std::span<const float> pixels() const { return pixels_; }

    bool same_shape(const Image& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    static std::size_t checked_size(int rows, int cols) {
        if (rows <= 0 || cols <= 0)
            throw ArgumentError("Image: rows and cols must be positive");
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }

    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(c);
    }

    int rows_;
    int cols_;
    double spacing_;
    std::vector<float> pixels_;
};

/// N co-registered images of identical dimensions. Order is the stack file
/// order; it carries no temporal meaning.
class ImageStack {
public:
    explicit ImageStack(std::vector<Image> images) : images_(std::move(images)) {
        if (images_.size() < 2)
            throw ArgumentError("ImageStack: at least 2 images required, got " +
                                std::to_string(images_.size()));
        const Image& first = images_.front();
        for (std::size_t i = 1; i < images_.size(); ++i) {
            if (!images_[i].same_shape(first))
                throw ArgumentError("ImageStack: image " + std::to_string(i) +
                                    " dimensions differ from image 0");
            if (images_[i].pixel_spacing_m() != first.pixel_spacing_m())
                throw ArgumentError("ImageStack: image " + std::to_string(i) +
                                    " pixel spacing differs from image 0");
        }
    }

    std::size_t size() const { return images_.size(); }
    int rows() const { return images_.front().rows(); }
    int cols() const { return images_.front().cols(); }
    double pixel_spacing_m() const { return images_.front().pixel_spacing_m(); }

    const Image& operator[](std::size_t i) const { return images_[i]; }
    const std::vector<Image>& images() const { return images_; }

private:
    std::vector<Image> images_;
};

/// The N samples of one pixel position across a stack, in stack order.
using PixelSeries = std::vector<double>;

/// Boolean raster sharing the Image storage convention. Bits are stored as
/// 0/1 bytes; immutable after construction.
class BinaryMask {
public:
    BinaryMask(int rows, int cols, bool fill = false)
        : BinaryMask(rows, cols,
                     std::vector<std::uint8_t>(checked_size(rows, cols),
                                               fill ? 1 : 0)) {}

    BinaryMask(int rows, int cols, std::vector<std::uint8_t> bits)
        : rows_(rows), cols_(cols), bits_(std::move(bits)) {
        if (rows_ <= 0 || cols_ <= 0)
            throw ArgumentError("BinaryMask: rows and cols must be positive");
        if (bits_.size() != checked_size(rows_, cols_))
            throw ArgumentError("BinaryMask: bit buffer size does not match rows*cols");
        for (auto& b : bits_) b = b ? 1 : 0;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    bool in_bounds(int r, int c) const {
        return r >= 0 && r < rows_ && c >= 0 && c < cols_;
    }

    bool at(int r, int c) const {
        if (!in_bounds(r, c))
            throw BoundsError("BinaryMask: coordinate (" + std::to_string(r) +
                              ", " + std::to_string(c) + ") outside " +
                              std::to_string(rows_) + "x" + std::to_string(cols_));
        return bits_[index(r, c)] != 0;
    }

    /// Unchecked access for hot loops.
    bool operator()(int r, int c) const { return bits_[index(r, c)] != 0; }

    std::span<const std::uint8_t> bits() const { return bits_; }

    std::size_t count_true() const {
        std::size_t n = 0;
        for (auto b : bits_) n += b;
        return n;
    }

    bool same_shape(const BinaryMask& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    static std::size_t checked_size(int rows, int cols) {
        if (rows <= 0 || cols <= 0)
            throw ArgumentError("BinaryMask: rows and cols must be positive");
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }

    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(c);
    }

    int rows_;
    int cols_;
    std::vector<std::uint8_t> bits_;
};

/// Ground-truth object position in pixel coordinates.
struct Target {
    std::string id;
    double row = 0.0;
    double col = 0.0;
};

/// Connected change region extracted from a detection mask.
struct Detection {
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    std::int64_t pixel_count = 0;
    int min_row = 0;
    int min_col = 0;
    int max_row = 0;
    int max_col = 0;
};

/// Parameters of the change-detection pipeline.
struct CdaParams {
    double c_constant = 5.0;
    int opening_kernel = 3;
    int dilation_kernel = 7;
    int connectivity = 8;

    void validate() const {
        if (!(c_constant > 0.0))
            throw ArgumentError("CdaParams: c_constant must be positive");
        if (opening_kernel < 1 || opening_kernel % 2 == 0)
            throw ArgumentError("CdaParams: opening_kernel must be odd and >= 1");
        if (dilation_kernel < 1 || dilation_kernel % 2 == 0)
            throw ArgumentError("CdaParams: dilation_kernel must be odd and >= 1");
        if (connectivity != 4 && connectivity != 8)
            throw ArgumentError("CdaParams: connectivity must be 4 or 8");
    }
};

/// Reads the series at (row, col) into `out` without allocating when `out`
/// already has capacity.
inline void extract_series_into(const ImageStack& stack, int row, int col,
                                PixelSeries& out) {
    if (!stack[0].in_bounds(row, col))
        throw BoundsError("extract_series: coordinate (" + std::to_string(row) +
                          ", " + std::to_string(col) + ") outside " +
                          std::to_string(stack.rows()) + "x" +
                          std::to_string(stack.cols()));
    out.resize(stack.size());
    for (std::size_t i = 0; i < stack.size(); ++i)
        out[i] = static_cast<double>(stack[i](row, col));
}

/// Pure projection of the stack: the N values at (row, col) in stack order.
inline PixelSeries extract_series(const ImageStack& stack, int row, int col) {
    PixelSeries series;
    extract_series_into(stack, row, col, series);
    return series;
}

}  // namespace gspcd
