#include "hvdflow/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hvdflow/data_term.hpp"

namespace hvdflow {

const char* to_string(SelectionScheme::Kind kind) {
    switch (kind) {
        case SelectionScheme::Kind::full: return "full";
        case SelectionScheme::Kind::random: return "random";
        case SelectionScheme::Kind::significant: return "significant";
        case SelectionScheme::Kind::combined: return "combined";
    }
    return "?";
}

SelectionScheme::Kind selection_kind_from_string(const std::string& name) {
    if (name == "full") return SelectionScheme::Kind::full;
    if (name == "random") return SelectionScheme::Kind::random;
    if (name == "significant") return SelectionScheme::Kind::significant;
    if (name == "combined") return SelectionScheme::Kind::combined;
    throw std::invalid_argument("unknown selection scheme: " + name);
}

namespace {

// Unbiased bounded draw built directly on the engine output so that results
// are identical across standard libraries.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = n == 0 ? 0 : UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

// Draws `count` indices uniformly without replacement from `pool` (consumed).
std::vector<std::uint32_t> sample_without_replacement(std::vector<std::uint32_t> pool,
                                                      std::size_t count, std::mt19937_64& rng) {
    std::vector<std::uint32_t> picked;
    picked.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::uint64_t j = bounded_draw(rng, pool.size() - k);
        std::swap(pool[k + j], pool[k]);
        picked.push_back(pool[k]);
    }
    return picked;
}

// Indices of the `count` largest magnitudes, ties broken by ascending index.
std::vector<std::uint32_t> top_by_magnitude(const std::vector<double>& mag, std::size_t count) {
    std::vector<std::uint32_t> order(mag.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (mag[a] != mag[b]) return mag[a] > mag[b];
        return a < b;
    });
    order.resize(count);
    return order;
}

}  // namespace

std::vector<double> significance_magnitudes(const DerivativeStack& stack) {
    const std::size_t n = stack.pixel_count();
    std::vector<double> mag(n);
    if (stack.kind == DataTermKind::GCA) {
        for (std::size_t p = 0; p < n; ++p) {
            const double r1 = std::sqrt(stack.Ixx[p] * stack.Ixx[p] + stack.Ixy[p] * stack.Ixy[p]);
            const double r2 = std::sqrt(stack.Iyx[p] * stack.Iyx[p] + stack.Iyy[p] * stack.Iyy[p]);
            mag[p] = std::max(r1, r2);
        }
    } else {
        for (std::size_t p = 0; p < n; ++p)
            mag[p] = std::sqrt(stack.Ix[p] * stack.Ix[p] + stack.Iy[p] * stack.Iy[p]);
    }
    return mag;
}

MeasurementMask select(const SelectionScheme& scheme, const DerivativeStack& stack) {
    const std::size_t n = stack.pixel_count();
    if (n == 0) throw std::invalid_argument("select: empty stack");
    if (scheme.ratio <= 0.0 || scheme.ratio > 1.0)
        throw std::invalid_argument("select: ratio must lie in (0,1]");

    MeasurementMask mask;
    mask.selected.assign(n, 0);
    mask.ratio = scheme.ratio;

    if (scheme.kind == SelectionScheme::Kind::full) {
        mask.selected.assign(n, 1);
        mask.m = static_cast<int>(n);
        mask.ratio = 1.0;
        return mask;
    }

    const std::size_t m =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(scheme.ratio * n)));
    std::vector<std::uint32_t> chosen;

    switch (scheme.kind) {
        case SelectionScheme::Kind::random: {
            std::vector<std::uint32_t> pool(n);
            std::iota(pool.begin(), pool.end(), 0u);
            std::mt19937_64 rng(scheme.seed);
            chosen = sample_without_replacement(std::move(pool), m, rng);
            break;
        }
        case SelectionScheme::Kind::significant: {
            chosen = top_by_magnitude(significance_magnitudes(stack), m);
            break;
        }
        case SelectionScheme::Kind::combined: {
            if (scheme.significant_fraction < 0.0 || scheme.significant_fraction > scheme.ratio)
                throw std::invalid_argument(
                    "select: combined significant_fraction must lie in [0, ratio]");
            const std::size_t m_sig = std::min<std::size_t>(
                m, static_cast<std::size_t>(std::llround(scheme.significant_fraction * n)));
            chosen = top_by_magnitude(significance_magnitudes(stack), m_sig);
            std::vector<std::uint8_t> taken(n, 0);
            for (std::uint32_t p : chosen) taken[p] = 1;
            std::vector<std::uint32_t> pool;
            pool.reserve(n - m_sig);
            for (std::uint32_t p = 0; p < n; ++p)
                if (!taken[p]) pool.push_back(p);
            std::mt19937_64 rng(scheme.seed);
            const std::vector<std::uint32_t> extra =
                sample_without_replacement(std::move(pool), m - m_sig, rng);
            chosen.insert(chosen.end(), extra.begin(), extra.end());
            break;
        }
        default:
            break;
    }

    for (std::uint32_t p : chosen) mask.selected[p] = 1;
    mask.m = static_cast<int>(chosen.size());
    return mask;
}

}  // namespace hvdflow
