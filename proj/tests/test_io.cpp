#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

using namespace cdsfcrf;
using namespace testing_support;

TEST(CdksFormat, HeaderLayoutIsBitExact) {
    KSpace ks(Dims{3, 2});
    ks[0] = Complex(1.0, -2.0);
    const std::string bytes = io::encode_kspace(ks);
    ASSERT_EQ(bytes.size(), 16u + 6u * 16u);
    EXPECT_EQ(bytes.substr(0, 4), "CDKS");
    const unsigned char expected_hdr[12] = {1, 0, 0, 0, 3, 0, 0, 0, 2, 0, 0, 0};
    EXPECT_EQ(std::memcmp(bytes.data() + 4, expected_hdr, 12), 0);
    // 1.0 as little-endian IEEE-754: 00 00 00 00 00 00 F0 3F
    const unsigned char one[8] = {0, 0, 0, 0, 0, 0, 0xF0, 0x3F};
    EXPECT_EQ(std::memcmp(bytes.data() + 16, one, 8), 0);
    const unsigned char minus_two[8] = {0, 0, 0, 0, 0, 0, 0, 0xC0};
    EXPECT_EQ(std::memcmp(bytes.data() + 24, minus_two, 8), 0);
}

TEST(CdimFormat, RoundTripIsLossless) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 10; ++trial) {
        const Dims d{1 + gen() % 30, 1 + gen() % 30};
        Image img = random_image(d, gen(), -1e6, 1e6);
        img[0] = -0.0;
        img[d.size() - 1] = 5e-324;
        const Image back = io::decode_image(io::encode_image(img));
        ASSERT_EQ(back.dims(), d);
        for (std::size_t i = 0; i < d.size(); ++i) ASSERT_EQ(std::bit_cast<std::uint64_t>(back[i]), std::bit_cast<std::uint64_t>(img[i]));

        const KSpace ks = random_kspace(d, gen());
        ASSERT_EQ(io::decode_kspace(io::encode_kspace(ks)), ks);
    }
}

TEST(CdimFormat, RejectsMalformedInput) {
    const std::string good = io::encode_image(Image(Dims{2, 2}, 1.0));
    EXPECT_THROW(io::decode_image(good.substr(0, good.size() - 1)), FormatError);
    EXPECT_THROW(io::decode_image(good + "x"), FormatError);
    std::string bad_magic = good;
    bad_magic[0] = 'X';
    EXPECT_THROW(io::decode_image(bad_magic), FormatError);
    std::string bad_version = good;
    bad_version[4] = 2;
    EXPECT_THROW(io::decode_image(bad_version), FormatError);
    EXPECT_THROW(io::decode_kspace(good), FormatError); // CDIM bytes are not CDKS
}

TEST(PbmFormat, PacksRowsMsbFirst) {
    SamplingMask m(Dims{10, 2}, 0);
    m.at(0, 0) = 1;
    m.at(0, 9) = 1;
    m.at(1, 7) = 1;
    const std::string bytes = io::encode_pbm(m);
    const std::string header = "P4\n10 2\n";
    ASSERT_EQ(bytes.size(), header.size() + 4);
    EXPECT_EQ(bytes.substr(0, header.size()), header);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 0]), 0x80);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 1]), 0x40);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 2]), 0x01);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 3]), 0x00);
    EXPECT_EQ(io::decode_pbm(bytes), m);
}

TEST(PbmFormat, RadialMaskRoundTripAndComments) {
    const SamplingMask m = radial_mask(37, 21, 6);
    EXPECT_EQ(io::decode_pbm(io::encode_pbm(m)), m);
    std::string with_comment = io::encode_pbm(m);
    with_comment.insert(3, "# comment\n");
    EXPECT_EQ(io::decode_pbm(with_comment), m);
    EXPECT_THROW(io::decode_pbm("P5\n2 2\n"), FormatError);
}

TEST(PgmPreview, SixteenBitBigEndianWithRange) {
    Image img(Dims{2, 1});
    img[0] = -1.0;
    img[1] = 3.0;
    io::PreviewRange range;
    const std::string bytes = io::encode_pgm16(img, range);
    const std::string header = "P5\n2 1\n65535\n";
    ASSERT_EQ(bytes.size(), header.size() + 4);
    EXPECT_EQ(bytes.substr(0, header.size()), header);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size()]), 0x00);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 2]), 0xFF);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 3]), 0xFF);
    EXPECT_EQ(range.min, -1.0);
    EXPECT_EQ(range.max, 3.0);
    EXPECT_EQ(io::encode_range(range), "min -1\nmax 3\n");
}

TEST(FileIo, AtomicWriteAndRead) {
    const auto dir = std::filesystem::temp_directory_path() / "cdsfcrf_io_test";
    std::filesystem::create_directories(dir);
    const Image img = random_image(Dims{5, 4}, 1);
    io::write_image(dir / "a.cdim", img);
    EXPECT_FALSE(std::filesystem::exists(dir / "a.cdim.tmp"));
    EXPECT_EQ(io::read_image(dir / "a.cdim"), img);
    EXPECT_THROW(io::read_image(dir / "missing.cdim"), FormatError);
    std::filesystem::remove_all(dir);
}

TEST(KeyValue, ParsesCommentsAndOverrides) {
    const auto t = kv::parse("# c\n a = 1 \n\nb=two words\na = 3\n");
    EXPECT_EQ(t.at("a"), "3");
    EXPECT_EQ(t.at("b"), "two words");
    EXPECT_THROW(kv::parse("novalue\n"), FormatError);
    EXPECT_THROW(kv::to_double("k", "1.5x"), FormatError);
    EXPECT_THROW(kv::to_uint("k", "-1"), FormatError);
}
