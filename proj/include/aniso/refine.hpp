#pragma once

#include "aniso/mesh.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace aniso {

// One spatial bisection and m temporal bisections; returns the 2^{m+1} children.
std::vector<Id> atomic_split(Partition& p, Id prism);

struct PatchReport {
    Id marked = kNoId;
    int marked_level = 0;
    int max_created_level = -1;
    int max_depth = 0;               // deepest nested call, 0 when no recursion happened
    std::size_t atomic_splits = 0;
    std::vector<Id> split;           // prisms atomically split, in order
    std::vector<Id> created;         // every prism created during the call
};

// Refines `prism` and the minimal set of neighbours needed to keep the partition
// conforming in space and 1-irregular. The partition must be valid on entry.
PatchReport patch_refine(Partition& p, Id prism);

using MarkFn = std::function<std::vector<Id>(const Partition&)>;

struct LedgerRow {
    int round = 0;
    std::size_t marked = 0;         // #M_{k-1}
    std::size_t leaves = 0;         // #P_k
    std::size_t atomic_splits = 0;  // cumulative
    int max_level = 0;
};

enum class RefineStatus { Converged, BudgetExhausted };

struct RefinementLedger {
    std::vector<LedgerRow> rows;  // row 0 describes P_0
    RefineStatus status = RefineStatus::Converged;

    std::string to_csv() const;
};

struct RefineBudget {
    int max_rounds = 100;
    std::size_t max_leaves = 200000;
    int max_level = 40;
};

// Mark, stop on an empty mark set, patch-refine every marked prism that is still a leaf.
RefinementLedger marked_refine(Partition& p, const MarkFn& mark, const RefineBudget& budget);

struct CreationDistance {
    double distance = 0.0;
    double bound = 0.0;
    bool ok = true;
};

// Distance between the closures of two prisms (leaves or not).
double prism_distance(const Partition& p, Id a, Id b);

// dist(created, refined) <= C 2^{m/d} sum_{k=l(created)}^{l(refined)} 2^{-k m/d}, m = min(s2/s1, 1).
CreationDistance creation_distance_check(const Partition& p, Id refined, Id created);

}  // namespace aniso
