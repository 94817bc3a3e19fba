#include "commands.hpp"

#include "aniso/config.hpp"
#include "aniso/mesh_io.hpp"
#include "aniso/parallel.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <sstream>

namespace aniso::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) { return fmt::format("{:.17g}", v); }

ExperimentConfig load_config(const Invocation& inv) {
    if (inv.config.empty()) throw UsageError("this command needs --config FILE");
    ExperimentConfig c = ExperimentConfig::load(inv.config);
    set_thread_count(inv.threads >= 0 ? inv.threads : c.threads);
    spdlog::debug("config {} loaded, {} thread(s)", inv.config, thread_count());
    return c;
}

Partition load_mesh(const Invocation& inv) {
    if (inv.mesh.empty()) throw UsageError("this command needs a mesh file");
    if (inv.threads >= 0) set_thread_count(inv.threads);
    return Partition::from_text(read_text_file(inv.mesh));
}

fs::path out_path(const Invocation& inv, const std::string& name) {
    fs::create_directories(inv.out);
    return fs::path(inv.out) / name;
}

void write_out(const Invocation& inv, const std::string& name, const std::string& text) {
    const fs::path path = out_path(inv, name);
    write_text_file(path.string(), text);
    spdlog::info("wrote {}", path.string());
}

std::string vtk_text(const Partition& p, const std::map<Id, double>* indicator = nullptr) {
    std::ostringstream os;
    write_vtk(os, p, indicator);
    return os.str();
}

std::string solution_csv(const FeFunction& F) {
    const NodeLattice& lat = F.lattice();
    std::string out = "node,t,x,y,value\n";
    const std::vector<Id>& free = lat.free_nodes();
    for (std::size_t i = 0; i < free.size(); ++i) {
        const LagrangeNode& n = lat.node(free[i]);
        out += fmt::format("{},{},{},{},{}\n", n.id, num(n.t), num(n.x[0]), num(n.x[1]), num(F.coefficients()[i]));
    }
    return out;
}

int run_scripted(const ExperimentConfig& c, const Invocation& inv) {
    Partition final = c.initial_partition();
    const ComplexityStudy study = complexity_study(final, c.policy_options(), c.rounds, c.budget, &final);
    write_out(inv, "complexity.csv", study.to_csv());
    write_out(inv, "mesh.txt", final.to_text());
    fmt::print("policy {} rounds {} leaves {} slope {}\n", to_string(c.policy), study.rows.size() - 1, final.leaf_count(),
               num(study.slope));
    if (study.status == RefineStatus::BudgetExhausted) {
        spdlog::error("refinement budget exhausted after {} rounds", study.rows.size() - 1);
        return kBudget;
    }
    return kOk;
}

}  // namespace

int cmd_refine(const Invocation& inv) { return run_scripted(load_config(inv), inv); }

int cmd_adapt(const Invocation& inv) {
    const ExperimentConfig c = load_config(inv);
    if (c.scripted) return run_scripted(c, inv);
    const Partition roots = c.initial_partition();
    const TestFunction f = c.test_function();
    const AdaptOptions options = c.adapt_options(f);
    const std::vector<double> deltas = geometric_schedule(c.delta, c.factor, c.count);

    if (deltas.size() >= 6) {
        const RateStudy study = rate_study(roots, f.f, deltas, options, c.uniform_levels);
        write_out(inv, "rate_study.csv", study.to_csv());
        for (const RatePoint& p : study.points)
            spdlog::info("{} point: {} leaves in {:.2f} s", p.kind, p.leaves, p.seconds);
        fmt::print("adaptive slope {} (r2 {}), uniform slope {}, target {}\n", num(study.adaptive.slope),
                   num(study.adaptive.r2), num(study.uniform.slope), num(study.target_slope));
        if (!study.valid) spdlog::warn("fewer than 3 converged runs: the rate study is invalid");
    }

    const AdaptResult r = greedy_adapt(roots, f.f, deltas.back(), options);
    write_out(inv, "ledger.csv", r.ledger.to_csv());
    write_out(inv, "mesh.txt", r.partition->to_text());
    write_out(inv, "mesh.vtk", vtk_text(*r.partition));
    write_out(inv, "solution.csv", solution_csv(*r.solution));
    fmt::print("delta {} leaves {} error_lp {}{}\n", num(deltas.back()), r.leaves(), num(r.error_lp),
               options.besov_error ? " error_besov " + num(r.error_besov) : std::string());
    if (r.heuristic) spdlog::warn("some local best approximations used the heuristic p < 1 solver");
    if (!validate(*r.partition).ok) return kValidation;
    if (r.ledger.status == RefineStatus::BudgetExhausted) {
        spdlog::error("refinement budget exhausted: delta {} is too small for the budget", deltas.back());
        return kBudget;
    }
    return kOk;
}

int cmd_validate(const Invocation& inv) {
    const ValidityReport rep = validate(load_mesh(inv));
    if (rep.ok) {
        fmt::print("valid: {} time slabs checked, measure error {}\n", rep.slabs_checked, num(rep.measure_error));
        return kOk;
    }
    for (const std::string& v : rep.violations) fmt::print("violation: {}\n", v);
    return kValidation;
}

int cmd_nodes(const Invocation& inv) {
    const Partition p = load_mesh(inv);
    const NodeLattice lat = NodeLattice::classify(p, PolyOrders{inv.r1, inv.r2});
    write_out(inv, "nodes.txt", lat.dump());
    fmt::print("nodes {} free {} hanging {}\n", lat.node_count(), lat.free_nodes().size(), lat.hanging_nodes().size());
    return kOk;
}

int cmd_besov(const Invocation& inv) {
    const ExperimentConfig c = load_config(inv);
    const Partition roots = c.initial_partition();
    const TestFunction f = c.test_function();
    const BesovEstimate est = discrete_seminorm(f.f, Cylinder::domain(roots), c.norms.p, c.norms.q, c.params.s1,
                                                c.params.s2, c.orders, c.besov_scales);
    write_out(inv, "besov.csv", est.to_csv());
    fmt::print("seminorm {} tail {}\n", num(est.seminorm), num(est.tail));
    if (c.ladder > 0) {
        const MultiscaleLadder ladder =
            multiscale_norms(f.f, roots, c.besov_alpha_scale * c.params.s1, c.besov_alpha_scale * c.params.s2, c.norms,
                             c.orders, c.ladder);
        std::string csv = "n,leaves,hanging,delta_norm,pi_error,best_error\n";
        for (const LadderLevel& l : ladder.levels)
            csv += fmt::format("{},{},{},{},{},{}\n", l.n, l.leaves, l.hanging, num(l.delta_norm), num(l.pi_error),
                               num(l.best_error));
        csv += fmt::format("summary,{},{},{},{},{}\n", num(ladder.norm_delta), num(ladder.norm_pi), num(ladder.norm_e),
                           num(ladder.alpha1), num(ladder.alpha2));
        write_out(inv, "ladder.csv", csv);
        fmt::print("norm_delta {} norm_pi {} norm_e {}\n", num(ladder.norm_delta), num(ladder.norm_pi),
                   num(ladder.norm_e));
    }
    return kOk;
}

int cmd_export(const Invocation& inv) {
    const Partition p = load_mesh(inv);
    if (inv.format == "text")
        write_out(inv, "mesh.txt", p.to_text());
    else if (inv.format == "vtk")
        write_out(inv, "mesh.vtk", vtk_text(p));
    else
        throw UsageError(fmt::format("unknown export format '{}' (text or vtk)", inv.format));
    return kOk;
}

}  // namespace aniso::cli
