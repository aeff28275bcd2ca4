#include <doctest.h>

#include <thread>

#include "oracles.hpp"
#include "sigobf/fft.hpp"
#include "sigobf/rng.hpp"

using namespace sigobf;

namespace {
cvec random_vec(std::size_t n, std::uint64_t seed)
{
    Rng r(seed);
    cvec x(n);
    for (auto& v : x)
        v = r.complex_gaussian(1.0);
    return x;
}
} // namespace

TEST_CASE("forward matches the direct DFT for assorted lengths")
{
    for (std::size_t n : {1u, 2u, 7u, 64u, 100u, 127u}) {
        const cvec x = random_vec(n, n);
        const cvec got = fft::forward(x);
        const cvec want = oracle::naive_dft(x, -1);
        CHECK(oracle::max_abs_diff(got, want) < 1e-9);
    }
}

TEST_CASE("inverse matches the direct DFT with positive exponent")
{
    const cvec x = random_vec(48, 5);
    CHECK(oracle::max_abs_diff(fft::inverse(x), oracle::naive_dft(x, +1)) < 1e-9);
}

TEST_CASE("round trip scales by N")
{
    const cvec x = random_vec(256, 11);
    cvec y = fft::inverse(fft::forward(x));
    for (auto& v : y)
        v /= 256.0;
    CHECK(oracle::max_abs_diff(x, y) < 1e-12);
}

TEST_CASE("empty input gives empty output")
{
    CHECK(fft::forward(cvec{}).empty());
}

TEST_CASE("concurrent use is safe and deterministic")
{
    const cvec x = random_vec(512, 3);
    const cvec ref = fft::forward(x);
    std::vector<cvec> out(8);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < out.size(); ++t)
            pool.emplace_back([&, t] {
                for (int rep = 0; rep < 50; ++rep)
                    out[t] = fft::forward(x);
            });
    }
    for (const auto& o : out)
        CHECK(o == ref);
}
