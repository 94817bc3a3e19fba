#include "aniso/refine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace aniso {

std::vector<Id> atomic_split(Partition& p, Id prism) {
    if (!p.is_leaf(prism)) throw std::invalid_argument(fmt::format("atomic_split: prism {} is not a leaf", prism));
    const Prism pr = p.prism(prism);
    const int m = p.params().temporal_splits(pr.level + 1);
    std::vector<Id> intervals{pr.interval};
    for (int k = 0; k < m; ++k) {
        std::vector<Id> next;
        for (Id i : intervals) {
            auto [a, b] = p.split_interval(i);
            next.push_back(a);
            next.push_back(b);
        }
        intervals = std::move(next);
    }
    auto [s0, s1] = p.split_simplex(pr.simplex);
    std::vector<std::pair<Id, Id>> children;
    for (Id s : {s0, s1})
        for (Id i : intervals) children.emplace_back(i, s);
    return p.replace_leaf(prism, children);
}

namespace {

bool contains(const std::vector<Id>& sorted, Id x) { return std::binary_search(sorted.begin(), sorted.end(), x); }

void patch_refine_call(Partition& p, Id target, PatchReport& rep, int depth) {
    rep.max_depth = std::max(rep.max_depth, depth);
    const int level = p.prism(target).level;
    std::set<Id> done;                 // K
    std::vector<Id> front{target};     // F
    std::set<Id> in_front{target};
    while (!front.empty()) {
        std::vector<Id> next;           // F_new
        std::set<Id> in_next;
        auto take = [&](Id z) {
            if (done.count(z) || in_front.count(z) || in_next.count(z)) return;
            next.push_back(z);
            in_next.insert(z);
        };
        for (Id y : front) {
            // recursive calls change P, so N(y, P) is re-read until no recursion happens
            bool recursed = true;
            while (recursed) {
                recursed = false;
                if (!p.is_leaf(y)) throw std::logic_error("patch_refine: front element lost its leaf status");
                for (Id z : p.necessary_neighbors(y)) {
                    if (done.count(z) || in_front.count(z) || in_next.count(z) || !p.is_leaf(z)) continue;
                    const int lz = p.prism(z).level;
                    if (lz == level) {
                        take(z);
                        continue;
                    }
                    if (lz > level)
                        throw std::logic_error(fmt::format("patch_refine: neighbour {} is finer than {}", z, y));
                    const bool was_space = contains(p.neighbors_space(y), z);
                    patch_refine_call(p, z, rep, depth + 1);
                    recursed = true;
                    if (was_space) {
                        const std::vector<Id> now = p.necessary_neighbors(y);
                        for (Id w : p.prism_children(z))
                            if (p.is_leaf(w) && contains(now, w)) take(w);
                    }
                    break;
                }
            }
        }
        for (Id y : front) done.insert(y);
        front = std::move(next);
        in_front = std::move(in_next);
    }
    for (Id k : done) {
        const std::vector<Id> kids = atomic_split(p, k);
        ++rep.atomic_splits;
        rep.split.push_back(k);
        for (Id c : kids) {
            rep.created.push_back(c);
            rep.max_created_level = std::max(rep.max_created_level, p.prism(c).level);
        }
    }
}

}  // namespace

PatchReport patch_refine(Partition& p, Id prism) {
    if (!p.is_leaf(prism)) throw std::invalid_argument(fmt::format("patch_refine: prism {} is not a leaf", prism));
    PatchReport rep;
    rep.marked = prism;
    rep.marked_level = p.prism(prism).level;
    patch_refine_call(p, prism, rep, 0);
    return rep;
}

std::string RefinementLedger::to_csv() const {
    std::string out = "round,marked,leaves,atomic_splits,max_level\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{},{}\n", r.round, r.marked, r.leaves, r.atomic_splits, r.max_level);
    return out;
}

RefinementLedger marked_refine(Partition& p, const MarkFn& mark, const RefineBudget& budget) {
    RefinementLedger ledger;
    std::size_t splits = 0;
    ledger.rows.push_back(LedgerRow{0, 0, p.leaf_count(), 0, p.max_level()});
    for (int round = 1;; ++round) {
        if (round > budget.max_rounds) {
            ledger.status = RefineStatus::BudgetExhausted;
            break;
        }
        std::vector<Id> marked = mark(p);
        std::sort(marked.begin(), marked.end());
        marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
        if (marked.empty()) break;
        bool over = false;
        for (Id m : marked) {
            if (!p.is_leaf(m)) continue;
            if (p.prism(m).level + 1 > budget.max_level || p.leaf_count() > budget.max_leaves) {
                over = true;
                break;
            }
            splits += patch_refine(p, m).atomic_splits;
        }
        ledger.rows.push_back(LedgerRow{round, marked.size(), p.leaf_count(), splits, p.max_level()});
        if (over) {
            ledger.status = RefineStatus::BudgetExhausted;
            break;
        }
    }
    return ledger;
}

double prism_distance(const Partition& p, Id a, Id b) {
    const auto& ia = p.interval_of(a);
    const auto& ib = p.interval_of(b);
    const double dt = std::max({0.0, ib.lo - ia.hi, ia.lo - ib.hi});
    const double dx = simplex_distance(p.simplex_of(a), p.simplex_of(b));
    return std::sqrt(dt * dt + dx * dx);
}

CreationDistance creation_distance_check(const Partition& p, Id refined, Id created) {
    const int d = p.dim();
    const double m = std::min(p.params().s2 / p.params().s1, 1.0);
    const double c = upper_diameter_constant(p.root_sizes(), d);
    const int lc = p.prism(created).level;
    const int lr = p.prism(refined).level;
    double sum = 0.0;
    for (int k = lc; k <= lr; ++k) sum += std::exp2(-k * m / d);
    CreationDistance out;
    out.distance = prism_distance(p, refined, created);
    out.bound = c * std::exp2(m / d) * sum;
    out.ok = out.distance <= out.bound * (1.0 + 1e-12);
    return out;
}

}  // namespace aniso
