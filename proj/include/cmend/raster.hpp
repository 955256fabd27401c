#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cmend {

struct PixelCoord {
    int row = 0;
    int col = 0;

    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
    friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

inline int chebyshev(PixelCoord a, PixelCoord b) {
    return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

// 8-bit grayscale raster, row-major. Row 0 is the top of the image.
class GrayImage {
public:
    GrayImage() = default;

    GrayImage(int width, int height, std::uint8_t fill = 0)
        : width_(width), height_(height) {
        check_dims(width, height);
        data_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    GrayImage(int width, int height, std::vector<std::uint8_t> data)
        : width_(width), height_(height), data_(std::move(data)) {
        check_dims(width, height);
        if (data_.size() != static_cast<std::size_t>(width) * height)
            throw std::invalid_argument("GrayImage: pixel buffer size does not match dimensions");
    }

    static GrayImage from_values(int width, int height, const std::vector<int>& values) {
        check_dims(width, height);
        if (values.size() != static_cast<std::size_t>(width) * height)
            throw std::invalid_argument("GrayImage: value list size does not match dimensions");
        std::vector<std::uint8_t> buf(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] < 0 || values[i] > 255)
                throw std::invalid_argument("GrayImage: pixel value outside [0, 255]");
            buf[i] = static_cast<std::uint8_t>(values[i]);
        }
        return GrayImage(width, height, std::move(buf));
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    std::uint8_t at(int row, int col) const {
        return data_[static_cast<std::size_t>(row) * width_ + col];
    }
    std::uint8_t at(PixelCoord p) const { return at(p.row, p.col); }

    // Out-of-bounds reads see a constant pad value; neighborhood operators rely on this.
    std::uint8_t at_or(int row, int col, std::uint8_t pad = 0) const {
        return in_bounds(row, col) ? at(row, col) : pad;
    }

    void set(int row, int col, std::uint8_t v) {
        data_[static_cast<std::size_t>(row) * width_ + col] = v;
    }
    void set(PixelCoord p, std::uint8_t v) { set(p.row, p.col, v); }

    const std::vector<std::uint8_t>& pixels() const { return data_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    static void check_dims(int width, int height) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("image dimensions must be positive");
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

// Binary raster with values restricted to {0, 1}; 1 is foreground (ink).
class BinaryImage {
public:
    BinaryImage() = default;

    BinaryImage(int width, int height, std::uint8_t fill = 0)
        : width_(width), height_(height) {
        check_dims(width, height);
        check_value(fill);
        data_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    BinaryImage(int width, int height, std::vector<std::uint8_t> data)
        : width_(width), height_(height), data_(std::move(data)) {
        check_dims(width, height);
        if (data_.size() != static_cast<std::size_t>(width) * height)
            throw std::invalid_argument("BinaryImage: pixel buffer size does not match dimensions");
        for (std::uint8_t v : data_) check_value(v);
    }

    static BinaryImage from_values(int width, int height, const std::vector<int>& values) {
        check_dims(width, height);
        if (values.size() != static_cast<std::size_t>(width) * height)
            throw std::invalid_argument("BinaryImage: value list size does not match dimensions");
        std::vector<std::uint8_t> buf(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] != 0 && values[i] != 1)
                throw std::invalid_argument("BinaryImage: pixel value must be 0 or 1");
            buf[i] = static_cast<std::uint8_t>(values[i]);
        }
        return BinaryImage(width, height, std::move(buf));
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    std::uint8_t at(int row, int col) const {
        return data_[static_cast<std::size_t>(row) * width_ + col];
    }
    std::uint8_t at(PixelCoord p) const { return at(p.row, p.col); }

    std::uint8_t at_or(int row, int col, std::uint8_t pad = 0) const {
        return in_bounds(row, col) ? at(row, col) : pad;
    }

    void set(int row, int col, std::uint8_t v) {
        check_value(v);
        data_[static_cast<std::size_t>(row) * width_ + col] = v;
    }
    void set(PixelCoord p, std::uint8_t v) { set(p.row, p.col, v); }

    const std::vector<std::uint8_t>& pixels() const { return data_; }

    std::size_t foreground_count() const {
        std::size_t n = 0;
        for (std::uint8_t v : data_) n += v;
        return n;
    }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
    static void check_dims(int width, int height) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("image dimensions must be positive");
    }
    static void check_value(std::uint8_t v) {
        if (v > 1) throw std::invalid_argument("BinaryImage: pixel value must be 0 or 1");
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

// Expand a binary image to 8-bit, mapping foreground/background to chosen intensities.
inline GrayImage promote(const BinaryImage& img, std::uint8_t foreground = 255,
                         std::uint8_t background = 0) {
    std::vector<std::uint8_t> buf(img.pixels().size());
    for (std::size_t i = 0; i < buf.size(); ++i)
        buf[i] = img.pixels()[i] ? foreground : background;
    return GrayImage(img.width(), img.height(), std::move(buf));
}

} // namespace cmend
