#include <doctest.h>

#include "cmend/netpbm.hpp"

#include <random>
#include <string>

using namespace cmend;

namespace {

GrayImage random_gray(std::mt19937& rng, int w, int h) {
    std::uniform_int_distribution<int> value(0, 255);
    std::vector<int> data(static_cast<std::size_t>(w) * h);
    for (int& v : data) v = value(rng);
    return GrayImage::from_values(w, h, data);
}

BinaryImage random_binary(std::mt19937& rng, int w, int h) {
    std::uniform_int_distribution<int> value(0, 1);
    std::vector<int> data(static_cast<std::size_t>(w) * h);
    for (int& v : data) v = value(rng);
    return BinaryImage::from_values(w, h, data);
}

} // namespace

TEST_CASE("pgm ascii decode of a 2x1 image") {
    GrayImage img = decode_pgm("P2\n2 1\n255\n0 255\n");
    CHECK(img.width() == 2);
    CHECK(img.height() == 1);
    CHECK(img.at(0, 0) == 0);
    CHECK(img.at(0, 1) == 255);
}

TEST_CASE("pgm binary stream decodes to the same image as ascii") {
    std::string p5 = "P5\n2 1\n255\n";
    p5.push_back('\0');
    p5.push_back(static_cast<char>(255));
    GrayImage a = decode_pgm("P2\n2 1\n255\n0 255\n");
    GrayImage b = decode_pgm(p5);
    CHECK(a == b);
}

TEST_CASE("pgm ascii encode emits the canonical layout") {
    GrayImage img = GrayImage::from_values(1, 1, {128});
    CHECK(encode_pgm(img, PnmEncoding::ascii) == "P2\n1 1\n255\n128\n");
}

TEST_CASE("pbm ascii encode emits the canonical layout") {
    BinaryImage img = BinaryImage::from_values(1, 2, {1, 0});
    CHECK(encode_pbm(img, PnmEncoding::ascii) == "P1\n1 2\n1\n0\n");
    CHECK(decode_pbm("P1\n1 2\n1\n0\n") == img);
}

TEST_CASE("header comments and CRLF line endings are tolerated") {
    GrayImage img = decode_pgm("P2 # magic\r\n# a comment line\r\n2 1 # dims\r\n255\r\n7 9\r\n");
    CHECK(img.at(0, 0) == 7);
    CHECK(img.at(0, 1) == 9);
    BinaryImage b = decode_pbm("P1\r\n# hi\r\n2 2\r\n1011\r\n");
    CHECK(b.at(0, 0) == 1);
    CHECK(b.at(0, 1) == 0);
    CHECK(b.at(1, 0) == 1);
    CHECK(b.at(1, 1) == 1);
}

TEST_CASE("pbm ascii accepts packed digits without separators") {
    BinaryImage img = decode_pbm("P1\n4 1\n1010\n");
    CHECK(img.at(0, 0) == 1);
    CHECK(img.at(0, 1) == 0);
    CHECK(img.at(0, 2) == 1);
    CHECK(img.at(0, 3) == 0);
}

TEST_CASE("pbm binary rows are padded to whole bytes, most significant bit first") {
    // 9 columns -> 2 bytes per row; bit pattern 1000'0000 1 -> pixels 1,0,...,0,1
    std::string p4 = "P4\n9 1\n";
    p4.push_back(static_cast<char>(0b10000000));
    p4.push_back(static_cast<char>(0b10000000));
    BinaryImage img = decode_pbm(p4);
    CHECK(img.at(0, 0) == 1);
    for (int c = 1; c < 8; ++c) CHECK(img.at(0, c) == 0);
    CHECK(img.at(0, 8) == 1);
}

TEST_CASE("malformed inputs are rejected with distinct diagnostics") {
    CHECK_THROWS_WITH_AS(decode_pgm("P3\n1 1\n255\n0\n"), doctest::Contains("magic"), PnmError);
    CHECK_THROWS_WITH_AS(decode_pgm("P2\n2 2\n255\n0 0 0\n"), doctest::Contains("truncated"),
                         PnmError);
    CHECK_THROWS_WITH_AS(decode_pgm("P2\n1 1\n999\n0\n"), doctest::Contains("maxval"), PnmError);
    CHECK_THROWS_WITH_AS(decode_pgm("P2\n1 1\n255\n256\n"), doctest::Contains("exceeds"),
                         PnmError);
    CHECK_THROWS_WITH_AS(decode_pgm("P2\n0 1\n255\n"), doctest::Contains("dimensions"), PnmError);
    CHECK_THROWS_AS(decode_pgm("P2\n1\n"), PnmError);
    CHECK_THROWS_AS(decode_pgm("P2\nx 1\n255\n0\n"), PnmError);

    std::string p5 = "P5\n2 2\n255\n";
    p5 += "abc"; // one byte short
    CHECK_THROWS_WITH_AS(decode_pgm(p5), doctest::Contains("truncated"), PnmError);

    CHECK_THROWS_WITH_AS(decode_pbm("P7\n1 1\n0\n"), doctest::Contains("magic"), PnmError);
    CHECK_THROWS_WITH_AS(decode_pbm("P1\n2 1\n1\n"), doctest::Contains("truncated"), PnmError);
    CHECK_THROWS_WITH_AS(decode_pbm("P1\n1 1\n7\n"), doctest::Contains("0 or 1"), PnmError);
    CHECK_THROWS_WITH_AS(decode_pbm("P4\n9 2\n\x80"), doctest::Contains("truncated"), PnmError);
}

TEST_CASE("round-trip identity over random images in every encoding") {
    std::mt19937 rng(41);
    for (int i = 0; i < 25; ++i) {
        int w = 1 + static_cast<int>(rng() % 40);
        int h = 1 + static_cast<int>(rng() % 40);
        GrayImage g = random_gray(rng, w, h);
        CHECK(decode_pgm(encode_pgm(g, PnmEncoding::ascii)) == g);
        CHECK(decode_pgm(encode_pgm(g, PnmEncoding::binary)) == g);
        BinaryImage b = random_binary(rng, w, h);
        CHECK(decode_pbm(encode_pbm(b, PnmEncoding::ascii)) == b);
        CHECK(decode_pbm(encode_pbm(b, PnmEncoding::binary)) == b);
    }
}

TEST_CASE("image constructors reject out-of-range values") {
    CHECK_THROWS_AS(GrayImage::from_values(1, 1, {256}), std::invalid_argument);
    CHECK_THROWS_AS(GrayImage::from_values(1, 1, {-1}), std::invalid_argument);
    CHECK_THROWS_AS(BinaryImage::from_values(1, 1, {2}), std::invalid_argument);
    CHECK_THROWS_AS(GrayImage(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(GrayImage::from_values(2, 2, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("file helpers surface I/O failures") {
    CHECK_THROWS_AS(load_pgm("/nonexistent/path/image.pgm"), IoError);
    CHECK_THROWS_AS(load_pbm("/nonexistent/path/image.pbm"), IoError);
}
