#pragma once

#include "aniso/mesh.hpp"
#include "aniso/reference_element.hpp"

#include <string>
#include <vector>

namespace aniso {

enum class NodeStatus { Free, HangingInTime, HangingInSpace };

const char* to_string(NodeStatus s);

struct LagrangeNode {
    Id id = kNoId;
    double t = 0.0;
    Point x{};
    std::vector<Id> owners;   // leaves whose local lattice contains the node, ascending
    std::vector<Id> hangers;  // leaves whose closure contains it without it being a local node, ascending
    NodeStatus status = NodeStatus::Free;
    Id master = kNoId;        // hanger whose local polynomial defines the value
};

struct NodeWeight {
    Id dof = kNoId;
    double w = 0.0;
};

// Local node coordinates of a prism in canonical order (time-major, then lexicographic multi-index).
std::vector<std::pair<double, Point>> local_nodes(const TimeInterval& ivl, const TaggedSimplex& s,
                                                  const ReferenceElement& ref);

// Global Lagrange lattice of a partition with hanging/free classification and constraint weights.
// Holds a pointer to the partition, which must outlive the lattice and stay unchanged.
class NodeLattice {
public:
    static NodeLattice classify(const Partition& p, PolyOrders orders);

    const Partition& partition() const { return *p_; }
    const PolyOrders& orders() const { return ref_.orders(); }
    const ReferenceElement& reference() const { return ref_; }

    std::size_t node_count() const { return nodes_.size(); }
    const LagrangeNode& node(Id id) const { return nodes_.at(id); }
    const std::vector<Id>& local(Id prism) const { return local_.at(prism); }
    const std::vector<Id>& free_nodes() const { return free_; }
    const std::vector<Id>& hanging_nodes() const { return hanging_; }
    std::size_t dof_count() const { return free_.size(); }
    // dof index of a free node, kNoId for hanging nodes
    Id dof(Id node) const { return dof_.at(node); }
    // value of node = sum of w * coefficient[dof]
    const std::vector<NodeWeight>& weights(Id node) const { return weights_.at(node); }

    PrismFrame frame(Id prism) const;
    // Local node values of a leaf for a free-coefficient vector; its interpolant is the restriction.
    std::vector<double> local_values(Id prism, const std::vector<double>& coeffs) const;
    // Leaves carrying a nonzero local polynomial of phi_nu, ascending.
    std::vector<Id> basis_support(Id free_node) const;
    // basis_support for every dof at once, indexed by dof.
    std::vector<std::vector<Id>> all_supports() const;

    // `NODE id t x.. status master_prism` per line.
    std::string dump() const;

private:
    const Partition* p_ = nullptr;
    ReferenceElement ref_;
    std::vector<LagrangeNode> nodes_;
    std::vector<std::vector<Id>> local_;
    std::vector<Id> free_;
    std::vector<Id> hanging_;
    std::vector<Id> dof_;
    std::vector<std::vector<NodeWeight>> weights_;
};

}  // namespace aniso
