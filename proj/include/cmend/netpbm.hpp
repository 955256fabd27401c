#pragma once

#include "cmend/raster.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmend {

// Parse failure: the bytes do not form a valid PGM/PBM document.
struct PnmError : std::runtime_error {
    explicit PnmError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem failure: the file could not be opened, read, or written.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class PnmEncoding { ascii, binary };

// PGM (P2 ascii / P5 binary), maxval up to 255, '#' comments, LF or CRLF line ends.
GrayImage decode_pgm(std::string_view bytes);
std::string encode_pgm(const GrayImage& img, PnmEncoding enc = PnmEncoding::binary);

// PBM (P1 ascii / P4 binary); bit 1 is black and maps to foreground 1.
BinaryImage decode_pbm(std::string_view bytes);
std::string encode_pbm(const BinaryImage& img, PnmEncoding enc = PnmEncoding::binary);

GrayImage load_pgm(const std::string& path);
void save_pgm(const std::string& path, const GrayImage& img,
              PnmEncoding enc = PnmEncoding::binary);
BinaryImage load_pbm(const std::string& path);
void save_pbm(const std::string& path, const BinaryImage& img,
              PnmEncoding enc = PnmEncoding::binary);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

} // namespace cmend
