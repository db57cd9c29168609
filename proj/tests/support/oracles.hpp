#pragma once

// Brute-force reference implementations. They share no code with the library beyond
// data types, so agreement is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "artism/memory.hpp"
#include "artism/rng.hpp"

namespace artism::oracle {

/// Full sort by (score desc, tick desc, memory_id desc), then the first k.
inline std::vector<memory::MemoryRecord> top_k(const std::vector<memory::MemoryRecord>& stream, std::int64_t now,
                                               std::size_t k, const memory::RetrievalWeights& w) {
    struct Row {
        double score;
        const memory::MemoryRecord* m;
    };
    std::vector<Row> rows;
    const double total = w.w_recency + w.w_importance + w.w_salience;
    for (const auto& m : stream) {
        const double rec = std::pow(0.5, static_cast<double>(now - m.tick) / static_cast<double>(w.half_life));
        rows.push_back({(w.w_recency * rec + w.w_importance * m.importance + w.w_salience * m.salience) / total, &m});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.m->tick != b.m->tick) return a.m->tick > b.m->tick;
        return a.m->memory_id > b.m->memory_id;
    });
    std::vector<memory::MemoryRecord> out;
    for (std::size_t i = 0; i < rows.size() && i < k; ++i) out.push_back(*rows[i].m);
    return out;
}

/// Random stream of up to `max_size` memories with non-decreasing ticks. Importance and
/// salience come from a coarse grid so score ties actually occur.
inline memory::MemoryStream random_stream(std::mt19937_64& rng, std::size_t max_size, std::int64_t* now_out) {
    memory::MemoryStream s("oracle");
    std::uniform_int_distribution<std::size_t> size_d(0, max_size);
    std::uniform_int_distribution<int> grid(0, 8), step(0, 3);
    const auto n = size_d(rng);
    std::int64_t tick = 0;
    for (std::size_t i = 0; i < n; ++i) {
        tick += step(rng);
        auto rec = s.draft(tick, memory::MemoryKind::observation, "m" + std::to_string(i), {},
                           {grid(rng) / 8.0, grid(rng) / 8.0});
        s.append(std::move(rec));
    }
    *now_out = tick + step(rng);
    return s;
}

inline memory::RetrievalWeights random_weights(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> w(0, 4), hl(1, 32);
    memory::RetrievalWeights out;
    do {
        out.w_recency = w(rng) * 0.5;
        out.w_importance = w(rng) * 0.5;
        out.w_salience = w(rng) * 0.5;
    } while (out.w_recency + out.w_importance + out.w_salience <= 0);
    out.half_life = hl(rng);
    return out;
}

/// Every r-subset of {0..n-1} in lexicographic order, by bitmask enumeration.
inline std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t r) {
    std::vector<std::vector<std::size_t>> out;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != r) continue;
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(i);
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// The documented seeded draw, written out longhand: a dense Fisher-Yates over the
/// population with successive xorshift64* outputs seeded by splitmix64(seed).
inline std::vector<std::uint64_t> fisher_yates(std::uint64_t population, std::size_t m, std::uint64_t seed) {
    std::vector<std::uint64_t> idx(population);
    for (std::uint64_t i = 0; i < population; ++i) idx[i] = i;
    XorShift64Star rng(splitmix64(seed));
    const auto take = std::min<std::uint64_t>(m, population);
    for (std::uint64_t i = 0; i < take; ++i) {
        const auto j = i + rng.next() % (population - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(take);
    return idx;
}

}  // namespace artism::oracle
