#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <limits>
#include <vector>

#include "gspcd/core.hpp"
#include "gspcd/parallel.hpp"

using namespace gspcd;

namespace {

Image constant_image(int rows, int cols, float value) {
    return Image(rows, cols, value);
}

}  // namespace

TEST_CASE("Image validates its invariants", "[core]") {
    CHECK_THROWS_AS(Image(0, 4), ArgumentError);
    CHECK_THROWS_AS(Image(4, -1), ArgumentError);
    CHECK_THROWS_AS(Image(2, 2, std::vector<float>{1.0f, 2.0f}), ArgumentError);
    CHECK_THROWS_AS(Image(1, 1, std::vector<float>{0.0f}, 0.0), ArgumentError);

    const float nan = std::numeric_limits<float>::quiet_NaN();
    const float inf = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(Image(1, 2, std::vector<float>{0.0f, nan}), DataError);
    CHECK_THROWS_AS(Image(1, 2, std::vector<float>{inf, 0.0f}), DataError);

    const Image im(2, 3, std::vector<float>{1, 2, 3, 4, 5, 6});
    CHECK(im.rows() == 2);
    CHECK(im.cols() == 3);
    CHECK(im.pixel_count() == 6);
    CHECK(im.at(1, 2) == 6.0f);
    CHECK(im.pixel_spacing_m() == kDefaultPixelSpacingM);
    CHECK_THROWS_AS(im.at(2, 0), BoundsError);
    CHECK_THROWS_AS(im.at(0, 3), BoundsError);
    CHECK_THROWS_AS(im.at(-1, 0), BoundsError);
}

TEST_CASE("ImageStack requires at least two dimension-identical images", "[core]") {
    std::vector<Image> one;
    one.push_back(constant_image(2, 2, 1.0f));
    CHECK_THROWS_AS(ImageStack(std::move(one)), ArgumentError);

    std::vector<Image> mismatched;
    mismatched.push_back(constant_image(2, 2, 1.0f));
    mismatched.push_back(constant_image(2, 3, 1.0f));
    CHECK_THROWS_AS(ImageStack(std::move(mismatched)), ArgumentError);

    std::vector<Image> spacing;
    spacing.push_back(Image(2, 2, 1.0f, 2.5));
    spacing.push_back(Image(2, 2, 1.0f, 1.0));
    CHECK_THROWS_AS(ImageStack(std::move(spacing)), ArgumentError);

    std::vector<Image> ok;
    ok.push_back(constant_image(2, 2, 0.0f));
    ok.push_back(constant_image(2, 2, 2.0f));
    const ImageStack stack(std::move(ok));
    CHECK(stack.size() == 2);
    CHECK(stack.rows() == 2);
    CHECK(stack.cols() == 2);
}

TEST_CASE("extract_series reads the stack in order", "[core]") {
    SECTION("constant stack") {
        std::vector<Image> images(2, constant_image(3, 3, 1.0f));
        const ImageStack stack(std::move(images));
        const PixelSeries s = extract_series(stack, 0, 0);
        CHECK(s == PixelSeries{1.0, 1.0});
    }

    SECTION("identity read at (5,5)") {
        std::vector<Image> images;
        for (float v : {0.1f, 0.2f, 0.3f}) {
            std::vector<float> px(8 * 8, 0.0f);
            px[5 * 8 + 5] = v;
            images.push_back(Image(8, 8, std::move(px)));
        }
        const ImageStack stack(std::move(images));
        const PixelSeries s = extract_series(stack, 5, 5);
        REQUIRE(s.size() == 3);
        CHECK(s[0] == Catch::Approx(0.1).margin(1e-7));
        CHECK(s[1] == Catch::Approx(0.2).margin(1e-7));
        CHECK(s[2] == Catch::Approx(0.3).margin(1e-7));
    }

    SECTION("bounds error at (rows, 0)") {
        std::vector<Image> images(2, constant_image(4, 5, 1.0f));
        const ImageStack stack(std::move(images));
        CHECK_THROWS_AS(extract_series(stack, 4, 0), BoundsError);
        CHECK_THROWS_AS(extract_series(stack, 0, 5), BoundsError);
    }

    SECTION("length equals N everywhere") {
        std::vector<Image> images(5, constant_image(3, 4, 2.0f));
        const ImageStack stack(std::move(images));
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c)
                CHECK(extract_series(stack, r, c).size() == stack.size());
    }

    SECTION("pure projection: mutating the series leaves the stack unchanged") {
        std::vector<Image> images(3, constant_image(2, 2, 1.5f));
        const ImageStack stack(std::move(images));
        PixelSeries s = extract_series(stack, 1, 1);
        s[0] = 99.0;
        s[2] = -5.0;
        CHECK(extract_series(stack, 1, 1) == PixelSeries{1.5, 1.5, 1.5});
        CHECK(stack[0](1, 1) == 1.5f);
    }
}

TEST_CASE("BinaryMask stores normalized bits", "[core]") {
    CHECK_THROWS_AS(BinaryMask(0, 1), ArgumentError);
    CHECK_THROWS_AS(BinaryMask(2, 2, std::vector<std::uint8_t>{1, 0, 1}),
                    ArgumentError);
    const BinaryMask m(2, 2, std::vector<std::uint8_t>{0, 7, 1, 0});
    CHECK(m.at(0, 1));
    CHECK(m.bits()[1] == 1);  // nonzero input normalized to 1
    CHECK(m.count_true() == 2);
    CHECK_THROWS_AS(m.at(2, 0), BoundsError);
}

TEST_CASE("parallel_for_rows covers every row exactly once", "[core]") {
    for (int rows : {1, 2, 7, 10, 64}) {
        for (int threads : {1, 2, 3, 8, 100}) {
            std::vector<std::atomic<int>> visits(static_cast<std::size_t>(rows));
            parallel_for_rows(rows, threads, [&](int begin, int end) {
                for (int r = begin; r < end; ++r)
                    visits[static_cast<std::size_t>(r)].fetch_add(1);
            });
            for (int r = 0; r < rows; ++r) {
                CAPTURE(rows, threads, r);
                CHECK(visits[static_cast<std::size_t>(r)].load() == 1);
            }
        }
    }

    SECTION("worker exceptions propagate to the caller") {
        CHECK_THROWS_AS(parallel_for_rows(16, 4,
                                          [](int begin, int) {
                                              if (begin > 0)
                                                  throw ArgumentError("boom");
                                          }),
                        ArgumentError);
    }
}

TEST_CASE("CdaParams validation", "[core]") {
    CdaParams p;
    CHECK_NOTHROW(p.validate());

    CdaParams bad_c = p;
    bad_c.c_constant = 0.0;
    CHECK_THROWS_AS(bad_c.validate(), ArgumentError);

    CdaParams even_kernel = p;
    even_kernel.opening_kernel = 4;
    CHECK_THROWS_AS(even_kernel.validate(), ArgumentError);

    CdaParams bad_dilation = p;
    bad_dilation.dilation_kernel = -1;
    CHECK_THROWS_AS(bad_dilation.validate(), ArgumentError);

    CdaParams bad_conn = p;
    bad_conn.connectivity = 6;
    CHECK_THROWS_AS(bad_conn.validate(), ArgumentError);
}
