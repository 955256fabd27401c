#include "cmend/netpbm.hpp"

#include <cstddef>
#include <fstream>
#include <sstream>

namespace cmend {

namespace {

bool is_pnm_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Tokenizer over a PNM header: whitespace-separated tokens, '#' starts a
// comment that runs to end of line.
class TokenReader {
public:
    explicit TokenReader(std::string_view bytes) : bytes_(bytes) {}

    void skip_separators() {
        while (pos_ < bytes_.size()) {
            char c = bytes_[pos_];
            if (is_pnm_space(c)) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view next_token() {
        skip_separators();
        if (pos_ >= bytes_.size()) throw PnmError("pnm: truncated header");
        std::size_t start = pos_;
        while (pos_ < bytes_.size() && !is_pnm_space(bytes_[pos_]) && bytes_[pos_] != '#')
            ++pos_;
        return bytes_.substr(start, pos_ - start);
    }

    int next_uint(const char* what, long max_value) {
        std::string_view tok = next_token();
        long value = 0;
        if (tok.empty()) throw PnmError(std::string("pnm: missing ") + what);
        for (char c : tok) {
            if (c < '0' || c > '9')
                throw PnmError(std::string("pnm: non-numeric ") + what);
            value = value * 10 + (c - '0');
            if (value > max_value)
                throw PnmError(std::string("pnm: ") + what + " too large");
        }
        return static_cast<int>(value);
    }

    // After the last header token a single whitespace byte separates header
    // from raster; accept CRLF as one separator.
    void consume_raster_separator() {
        if (pos_ >= bytes_.size()) throw PnmError("pnm: truncated pixel data");
        char c = bytes_[pos_];
        if (!is_pnm_space(c)) throw PnmError("pnm: malformed header");
        ++pos_;
        if (c == '\r' && pos_ < bytes_.size() && bytes_[pos_] == '\n') ++pos_;
    }

    std::size_t pos() const { return pos_; }
    std::string_view rest() const { return bytes_.substr(pos_); }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

void check_dims_token(int w, int h) {
    if (w < 1 || h < 1) throw PnmError("pnm: invalid dimensions");
}

} // namespace

GrayImage decode_pgm(std::string_view bytes) {
    TokenReader rd(bytes);
    std::string_view magic = rd.next_token();
    if (magic != "P2" && magic != "P5") throw PnmError("pgm: bad magic number");
    int w = rd.next_uint("width", 1 << 24);
    int h = rd.next_uint("height", 1 << 24);
    check_dims_token(w, h);
    int maxval = rd.next_uint("maxval", 1 << 24);
    if (maxval < 1 || maxval > 255) throw PnmError("pgm: maxval outside [1, 255]");

    std::size_t count = static_cast<std::size_t>(w) * h;
    std::vector<std::uint8_t> buf(count);
    if (magic == "P5") {
        rd.consume_raster_separator();
        std::string_view raster = rd.rest();
        if (raster.size() < count) throw PnmError("pgm: truncated pixel data");
        for (std::size_t i = 0; i < count; ++i)
            buf[i] = static_cast<std::uint8_t>(raster[i]);
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            int v = rd.next_uint("pixel value", 1 << 24);
            if (v > maxval) throw PnmError("pgm: pixel value exceeds maxval");
            buf[i] = static_cast<std::uint8_t>(v);
        }
    }
    return GrayImage(w, h, std::move(buf));
}

std::string encode_pgm(const GrayImage& img, PnmEncoding enc) {
    std::ostringstream out;
    if (enc == PnmEncoding::binary) {
        out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
        out.write(reinterpret_cast<const char*>(img.pixels().data()),
                  static_cast<std::streamsize>(img.pixels().size()));
    } else {
        out << "P2\n" << img.width() << ' ' << img.height() << "\n255\n";
        for (int r = 0; r < img.height(); ++r) {
            for (int c = 0; c < img.width(); ++c) {
                if (c) out << ' ';
                out << static_cast<int>(img.at(r, c));
            }
            out << '\n';
        }
    }
    return out.str();
}

BinaryImage decode_pbm(std::string_view bytes) {
    TokenReader rd(bytes);
    std::string_view magic = rd.next_token();
    if (magic != "P1" && magic != "P4") throw PnmError("pbm: bad magic number");
    int w = rd.next_uint("width", 1 << 24);
    int h = rd.next_uint("height", 1 << 24);
    check_dims_token(w, h);

    std::size_t count = static_cast<std::size_t>(w) * h;
    std::vector<std::uint8_t> buf(count);
    if (magic == "P4") {
        rd.consume_raster_separator();
        std::string_view raster = rd.rest();
        std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
        if (raster.size() < row_bytes * h) throw PnmError("pbm: truncated pixel data");
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                std::uint8_t byte = static_cast<std::uint8_t>(raster[r * row_bytes + c / 8]);
                buf[static_cast<std::size_t>(r) * w + c] = (byte >> (7 - c % 8)) & 1;
            }
        }
    } else {
        // P1 digits may be packed together; read them character by character.
        std::size_t filled = 0;
        std::string_view rest = bytes;
        std::size_t pos = rd.pos();
        while (filled < count) {
            if (pos >= rest.size()) throw PnmError("pbm: truncated pixel data");
            char c = rest[pos++];
            if (is_pnm_space(c)) continue;
            if (c == '#') {
                while (pos < rest.size() && rest[pos] != '\n') ++pos;
                continue;
            }
            if (c != '0' && c != '1') throw PnmError("pbm: pixel value must be 0 or 1");
            buf[filled++] = static_cast<std::uint8_t>(c - '0');
        }
    }
    return BinaryImage(w, h, std::move(buf));
}

std::string encode_pbm(const BinaryImage& img, PnmEncoding enc) {
    std::ostringstream out;
    if (enc == PnmEncoding::binary) {
        out << "P4\n" << img.width() << ' ' << img.height() << '\n';
        std::size_t row_bytes = (static_cast<std::size_t>(img.width()) + 7) / 8;
        std::vector<char> row(row_bytes);
        for (int r = 0; r < img.height(); ++r) {
            std::fill(row.begin(), row.end(), 0);
            for (int c = 0; c < img.width(); ++c)
                if (img.at(r, c)) row[c / 8] |= static_cast<char>(1 << (7 - c % 8));
            out.write(row.data(), static_cast<std::streamsize>(row_bytes));
        }
    } else {
        out << "P1\n" << img.width() << ' ' << img.height() << '\n';
        for (int r = 0; r < img.height(); ++r) {
            for (int c = 0; c < img.width(); ++c) {
                if (c) out << ' ';
                out << static_cast<int>(img.at(r, c));
            }
            out << '\n';
        }
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure: " + path);
    return buf.str();
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failure: " + path);
}

GrayImage load_pgm(const std::string& path) { return decode_pgm(read_file(path)); }

void save_pgm(const std::string& path, const GrayImage& img, PnmEncoding enc) {
    write_file(path, encode_pgm(img, enc));
}

BinaryImage load_pbm(const std::string& path) { return decode_pbm(read_file(path)); }

void save_pbm(const std::string& path, const BinaryImage& img, PnmEncoding enc) {
    write_file(path, encode_pbm(img, enc));
}

} // namespace cmend
