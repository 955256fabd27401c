#include "cmend/preprocess.hpp"

#include <stdexcept>

namespace cmend {

Histogram histogram(const GrayImage& img) {
    Histogram h;
    for (std::uint8_t v : img.pixels()) ++h.bins[v];
    return h;
}

ThresholdReport spread_midpoint(const Histogram& hist) {
    int low = -1, high = -1;
    for (int i = 0; i < 256; ++i) {
        if (hist.bins[i]) {
            if (low < 0) low = i;
            high = i;
        }
    }
    if (low < 0) throw std::invalid_argument("spread_midpoint: empty histogram");
    return ThresholdReport{low, high, (low + high) / 2};
}

BinaryImage threshold(const GrayImage& img, int level) {
    if (level < 0 || level > 255)
        throw std::invalid_argument("threshold: level outside [0, 255]");
    std::vector<std::uint8_t> buf(img.pixels().size());
    for (std::size_t i = 0; i < buf.size(); ++i)
        buf[i] = img.pixels()[i] > level ? 0 : 1;
    return BinaryImage(img.width(), img.height(), std::move(buf));
}

BinaryImage median_filter3(const BinaryImage& img) {
    const int w = img.width(), h = img.height();
    std::vector<std::uint8_t> buf(img.pixels().size());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            int ones = 0;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc)
                    ones += img.at_or(r + dr, c + dc);
            buf[static_cast<std::size_t>(r) * w + c] = ones >= 5 ? 1 : 0;
        }
    }
    return BinaryImage(w, h, std::move(buf));
}

} // namespace cmend
