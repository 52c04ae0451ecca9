#include "atb/sched_sim.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

namespace atb {

std::string_view to_string(InstrKind kind) {
    switch (kind) {
        case InstrKind::vmac: return "vmac";
        case InstrKind::vload: return "vload";
        case InstrKind::vload_pop: return "vload_pop";
        case InstrKind::vstore: return "vstore";
    }
    return "?";
}

std::string_view to_string(SlotClass slot) {
    switch (slot) {
        case SlotClass::load: return "load";
        case SlotClass::store: return "store";
        case SlotClass::vmac: return "vmac";
    }
    return "?";
}

SlotCounts slots_of(const MicrokernelSpec& spec) { return {spec.u_ld, spec.u_st, spec.u_vmac}; }

namespace {

// Chains are laid out on a rows x cols grid for operand sharing: chain j
// reads A row j / cols and B column j % cols.
struct Grid {
    std::int64_t rows = 1;
    std::int64_t cols = 1;
};

Grid cluster_grid(std::int64_t chains) {
    Grid g;
    for (std::int64_t r = 1; r * r <= chains; ++r) {
        if (chains % r == 0) g.rows = r;
    }
    g.cols = chains / g.rows;
    return g;
}

std::int64_t integral_r_load(const MicrokernelSpec& spec) {
    if (spec.r_load.denominator() != 1) {
        throw std::invalid_argument("build_microkernel_dag: r_load must be a whole number, got " +
                                    to_string(spec.r_load));
    }
    return spec.r_load.numerator();
}

class DagBuilder {
public:
    explicit DagBuilder(std::vector<Instruction>& out) : out_(out) {}

    std::size_t add(InstrKind kind, std::int64_t latency, SlotClass slot, std::int64_t cluster,
                    std::int64_t chain, std::int64_t step) {
        Instruction ins;
        ins.id = out_.size();
        ins.kind = kind;
        ins.latency = latency;
        ins.slot = slot;
        ins.cluster = cluster;
        ins.chain = chain;
        ins.step = step;
        out_.push_back(std::move(ins));
        return out_.back().id;
    }

    void edge(std::size_t from, std::size_t to, std::int64_t delay, EdgeRole role) {
        auto& ins = out_[to];
        ins.predecessors.push_back({from, delay});
        ins.roles.push_back(role);
    }

    // A load, preceded by its pointer pop when unaligned. Returns the id of
    // the first instruction of the pair and of the load itself.
    std::pair<std::size_t, std::size_t> load(std::int64_t latency, bool unaligned,
                                             std::int64_t cluster, std::int64_t chain,
                                             std::int64_t step) {
        if (!unaligned) {
            const auto id = add(InstrKind::vload, latency, SlotClass::load, cluster, chain, step);
            return {id, id};
        }
        const auto pop = add(InstrKind::vload_pop, 1, SlotClass::load, cluster, chain, step);
        const auto ld = add(InstrKind::vload, latency, SlotClass::load, cluster, chain, step);
        edge(pop, ld, 1, EdgeRole::data);
        return {pop, ld};
    }

private:
    std::vector<Instruction>& out_;
};

struct ClusterIds {
    std::vector<std::size_t> prolog_heads;           // first instruction of each prolog load
    std::vector<std::vector<std::size_t>> vmac;      // [chain][step]
    std::vector<std::vector<std::size_t>> stores;    // [chain]
    std::size_t first = 0;
    std::size_t end = 0;
};

}  // namespace

Rational effective_r_load(const MicrokernelSpec& spec, bool share_inputs) {
    const std::int64_t r = integral_r_load(spec);
    if (!share_inputs) return Rational(r);
    const Grid g = cluster_grid(spec.chains);
    const std::int64_t ra = (r + 1) / 2;
    const std::int64_t rb = r - ra;
    return Rational(g.rows * ra + g.cols * rb, spec.chains);
}

std::vector<Instruction> build_microkernel_dag(const MicrokernelSpec& spec,
                                               const DagOptions& options) {
    spec.validate();
    const std::int64_t r = integral_r_load(spec);
    const std::int64_t c = spec.chains;
    const std::int64_t n = spec.n_accum;
    const Grid grid = cluster_grid(c);
    const std::int64_t ra = (r + 1) / 2;
    const std::int64_t rb = r - ra;
    // Two accumulator sets let cluster k+1 start while k drains.
    const bool alternate_accums = 2 * c <= spec.accum_regs;

    std::vector<Instruction> dag;
    DagBuilder b(dag);
    std::vector<ClusterIds> clusters;
    clusters.reserve(static_cast<std::size_t>(spec.n_clusters));

    for (std::int64_t k = 0; k < spec.n_clusters; ++k) {
        ClusterIds ids;
        ids.first = dag.size();

        std::vector<std::pair<std::size_t, std::int64_t>> prolog;  // (load id, latency)
        for (const auto& cls : spec.load_classes) {
            for (std::int64_t i = 0; i < cls.count; ++i) {
                const auto [head, ld] = b.load(cls.latency, cls.unaligned, k, -1, 0);
                ids.prolog_heads.push_back(head);
                prolog.emplace_back(ld, cls.latency);
            }
        }

        ids.vmac.assign(static_cast<std::size_t>(c), {});
        for (std::int64_t s = 0; s < n; ++s) {
            // Operand loads feeding step s; step 0 is fed by the prolog.
            // consumers[i] lists the chains reading load i.
            std::vector<std::size_t> heads;
            std::vector<std::size_t> loads;
            std::vector<std::vector<std::int64_t>> consumers;
            if (s > 0) {
                auto emit = [&](std::int64_t chain_tag, std::vector<std::int64_t> readers) {
                    const auto pair =
                        b.load(spec.steady_load_latency, spec.steady_unaligned, k, chain_tag, s);
                    heads.push_back(pair.first);
                    loads.push_back(pair.second);
                    consumers.push_back(std::move(readers));
                };
                if (!options.share_inputs) {
                    for (std::int64_t j = 0; j < c; ++j) {
                        for (std::int64_t q = 0; q < r; ++q) emit(j, {j});
                    }
                } else {
                    // Emitted in the order the chains first need them, so ties
                    // in the list scheduler favour chain 0.
                    std::vector<bool> row_done(static_cast<std::size_t>(grid.rows));
                    std::vector<bool> col_done(static_cast<std::size_t>(grid.cols));
                    for (std::int64_t j = 0; j < c; ++j) {
                        const std::int64_t row = j / grid.cols;
                        const std::int64_t col = j % grid.cols;
                        if (!row_done[static_cast<std::size_t>(row)]) {
                            row_done[static_cast<std::size_t>(row)] = true;
                            std::vector<std::int64_t> readers;
                            for (std::int64_t x = 0; x < grid.cols; ++x) {
                                readers.push_back(row * grid.cols + x);
                            }
                            for (std::int64_t q = 0; q < ra; ++q) emit(-1, readers);
                        }
                        if (!col_done[static_cast<std::size_t>(col)]) {
                            col_done[static_cast<std::size_t>(col)] = true;
                            std::vector<std::int64_t> readers;
                            for (std::int64_t y = 0; y < grid.rows; ++y) {
                                readers.push_back(y * grid.cols + col);
                            }
                            for (std::int64_t q = 0; q < rb; ++q) emit(-1, readers);
                        }
                    }
                }
                // Loads for step s belong to the loop body of step s-1, so they
                // never run ahead of its first VMAC. The register they write was
                // last read at step s-2 (two sets) or s-1 (one set); the s-2
                // edges are kept in both modes so double buffering only removes
                // edges.
                for (std::size_t i = 0; i < heads.size(); ++i) {
                    b.edge(ids.vmac[0][s - 1], heads[i], 0, EdgeRole::order);
                    for (const std::int64_t j : consumers[i]) {
                        if (s >= 2) b.edge(ids.vmac[j][s - 2], heads[i], 1, EdgeRole::war);
                        if (!options.double_buffer) {
                            b.edge(ids.vmac[j][s - 1], heads[i], 1, EdgeRole::war);
                        }
                    }
                }
            }
            for (std::int64_t j = 0; j < c; ++j) {
                const auto v = b.add(InstrKind::vmac, 1, SlotClass::vmac, k, j, s);
                if (s == 0) {
                    for (const auto& [ld, lat] : prolog) b.edge(ld, v, lat, EdgeRole::data);
                } else {
                    b.edge(ids.vmac[j][s - 1], v, spec.pipeline_depth, EdgeRole::accumulator);
                    for (std::size_t i = 0; i < loads.size(); ++i) {
                        if (std::find(consumers[i].begin(), consumers[i].end(), j) !=
                            consumers[i].end()) {
                            b.edge(loads[i], v, spec.steady_load_latency, EdgeRole::data);
                        }
                    }
                }
                ids.vmac[j].push_back(v);
            }
        }

        ids.stores.assign(static_cast<std::size_t>(c), {});
        for (std::int64_t j = 0; j < c; ++j) {
            for (std::int64_t i = 0; i < spec.n_store; ++i) {
                const auto st = b.add(InstrKind::vstore, spec.l_store, SlotClass::store, k, j, n);
                b.edge(ids.vmac[j][n - 1], st, spec.l_vmac_to_store, EdgeRole::data);
                ids.stores[j].push_back(st);
            }
        }
        ids.end = dag.size();

        if (k > 0) {
            const ClusterIds& prev = clusters.back();
            if (!options.overlap_clusters) {
                for (std::size_t id = ids.first; id < ids.end; ++id) {
                    if (!dag[id].predecessors.empty()) continue;
                    for (const auto& chain_stores : prev.stores) {
                        for (const auto st : chain_stores) {
                            b.edge(st, id, spec.l_store, EdgeRole::serialize);
                        }
                    }
                }
            } else {
                // VMACs stay in program order across clusters.
                for (std::int64_t j = 0; j < c; ++j) {
                    for (std::int64_t jp = 0; jp < c; ++jp) {
                        b.edge(prev.vmac[jp][n - 1], ids.vmac[j][0], 1, EdgeRole::order);
                    }
                }
                // Accumulator reuse: the owner of the register must have stored it.
                const ClusterIds* owner = nullptr;
                if (!alternate_accums) {
                    owner = &prev;
                } else if (k >= 2) {
                    owner = &clusters[clusters.size() - 2];
                }
                if (owner != nullptr) {
                    for (std::int64_t j = 0; j < c; ++j) {
                        for (const auto st : owner->stores[j]) {
                            b.edge(st, ids.vmac[j][0], 1, EdgeRole::accumulator);
                        }
                    }
                }
                // Prolog loads refill the step-0 register set: wait for the
                // previous cluster's last readers of that set.
                // The two-set edge is kept with one set too (implied there by
                // the chain), so double buffering only removes edges.
                const std::int64_t even_step = ((n - 1) / 2) * 2;
                for (const auto head : ids.prolog_heads) {
                    for (std::int64_t j = 0; j < c; ++j) {
                        b.edge(prev.vmac[j][even_step], head, 1, EdgeRole::war);
                        if (!options.double_buffer && even_step != n - 1) {
                            b.edge(prev.vmac[j][n - 1], head, 1, EdgeRole::war);
                        }
                    }
                }
            }
        }
        clusters.push_back(std::move(ids));
    }
    return dag;
}

namespace {

std::vector<std::size_t> topo_order(const std::vector<Instruction>& dag,
                                    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>>& succ) {
    const std::size_t n = dag.size();
    succ.assign(n, {});
    std::vector<std::size_t> indeg(n, 0);
    for (const auto& ins : dag) {
        if (ins.id >= n || &dag[ins.id] != &ins) {
            throw std::invalid_argument("schedule: instruction ids must equal their positions");
        }
        for (const auto& d : ins.predecessors) {
            if (d.id >= n) throw std::invalid_argument("schedule: dangling predecessor id");
            if (d.delay < 0) throw std::invalid_argument("schedule: negative dependence delay");
            succ[d.id].emplace_back(ins.id, d.delay);
            ++indeg[ins.id];
        }
    }
    std::vector<std::size_t> order;
    order.reserve(n);
    std::queue<std::size_t> q;
    for (std::size_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) q.push(i);
    }
    while (!q.empty()) {
        const auto i = q.front();
        q.pop();
        order.push_back(i);
        for (const auto& [s, d] : succ[i]) {
            if (--indeg[s] == 0) q.push(s);
        }
    }
    if (order.size() != n) throw std::invalid_argument("schedule: dependence graph has a cycle");
    return order;
}

}  // namespace

ScheduleResult schedule(const std::vector<Instruction>& dag, const SlotCounts& slots) {
    const std::size_t n = dag.size();
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> succ;
    const auto order = topo_order(dag, succ);

    for (const auto& ins : dag) {
        if (slots[static_cast<std::size_t>(ins.slot)] < 1) {
            throw std::invalid_argument("schedule: no " + std::string(to_string(ins.slot)) +
                                        " slots for instruction " + std::to_string(ins.id));
        }
    }

    // Longest path from issue of i to the completion of any sink.
    std::vector<std::int64_t> priority(n, 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto i = *it;
        std::int64_t p = dag[i].latency;
        for (const auto& [s, d] : succ[i]) p = std::max(p, d + priority[s]);
        priority[i] = p;
    }

    ScheduleResult result;
    result.cycle_of.assign(n, -1);
    std::vector<std::size_t> pending(n, 0);
    std::vector<std::int64_t> earliest(n, 0);
    for (const auto& ins : dag) pending[ins.id] = ins.predecessors.size();

    using Key = std::pair<std::int64_t, std::size_t>;  // (-priority, id)
    std::set<Key> ready;
    // Released instructions whose operands are not yet available: (earliest, id).
    std::priority_queue<Key, std::vector<Key>, std::greater<>> waiting;
    for (std::size_t i = 0; i < n; ++i) {
        if (pending[i] == 0) waiting.emplace(0, i);
    }

    std::size_t issued = 0;
    std::int64_t cycle = 0;
    while (issued < n) {
        if (ready.empty() && !waiting.empty()) cycle = std::max(cycle, waiting.top().first);
        SlotCounts used{};
        bool progress = true;
        while (progress) {
            progress = false;
            while (!waiting.empty() && waiting.top().first <= cycle) {
                const auto i = waiting.top().second;
                waiting.pop();
                ready.emplace(-priority[i], i);
            }
            for (auto it = ready.begin(); it != ready.end();) {
                const auto i = it->second;
                const auto cls = static_cast<std::size_t>(dag[i].slot);
                if (used[cls] >= slots[cls]) {
                    ++it;
                    continue;
                }
                ++used[cls];
                result.cycle_of[i] = cycle;
                ++issued;
                it = ready.erase(it);
                for (const auto& [s, d] : succ[i]) {
                    earliest[s] = std::max(earliest[s], cycle + d);
                    if (--pending[s] == 0) {
                        waiting.emplace(earliest[s], s);
                        // A zero-delay successor may still issue this cycle.
                        if (earliest[s] <= cycle) progress = true;
                    }
                }
            }
        }
        ++cycle;
    }

    std::int64_t first_vmac = -1;
    std::int64_t last_vmac = -1;
    std::int64_t max_cluster = 0;
    for (const auto& ins : dag) {
        const auto t = result.cycle_of[ins.id];
        result.total_cycles = std::max(result.total_cycles, t + ins.latency);
        max_cluster = std::max(max_cluster, ins.cluster);
        if (ins.kind != InstrKind::vmac) continue;
        ++result.n_vmacs;
        if (first_vmac < 0 || t < first_vmac) first_vmac = t;
        last_vmac = std::max(last_vmac, t);
    }
    if (result.total_cycles > 0) {
        result.vmac_issue_rate = Rational(result.n_vmacs, result.total_cycles);
    }
    if (result.n_vmacs == 0) {
        result.phase_times.prolog = result.total_cycles;
    } else {
        result.phase_times.prolog = first_vmac;
        result.phase_times.steady = last_vmac - first_vmac;
        result.phase_times.epilog = result.total_cycles - last_vmac;
    }
    const bool interior_only = max_cluster >= 2;
    for (const auto& ins : dag) {
        if (ins.kind != InstrKind::vmac) continue;
        if (interior_only && (ins.cluster == 0 || ins.cluster == max_cluster)) continue;
        result.steady_vmac_cycles.push_back(result.cycle_of[ins.id]);
    }
    std::sort(result.steady_vmac_cycles.begin(), result.steady_vmac_cycles.end());
    return result;
}

Measurement measure(const ScheduleResult& result) {
    Measurement m;
    if (result.total_cycles > 0) m.eff_micro_sim = Rational(result.n_vmacs, result.total_cycles);
    const auto& v = result.steady_vmac_cycles;
    if (v.size() >= 2) {
        m.ii_observed = Rational(v.back() - v.front(), static_cast<std::int64_t>(v.size()) - 1);
    }
    return m;
}

void write_schedule_csv(std::ostream& os, const std::vector<Instruction>& dag,
                        const ScheduleResult& result) {
    std::vector<std::tuple<std::int64_t, std::size_t, std::size_t>> rows;
    rows.reserve(dag.size());
    for (const auto& ins : dag) {
        rows.emplace_back(result.cycle_of.at(ins.id), static_cast<std::size_t>(ins.slot), ins.id);
    }
    std::sort(rows.begin(), rows.end());
    os << "cycle,slot,id,kind\n";
    for (const auto& [cycle, slot, id] : rows) {
        os << cycle << ',' << to_string(static_cast<SlotClass>(slot)) << ',' << id << ','
           << to_string(dag[id].kind) << '\n';
    }
}

std::optional<std::string> check_schedule(const std::vector<Instruction>& dag,
                                          const SlotCounts& slots, const ScheduleResult& result) {
    if (result.cycle_of.size() != dag.size()) return "schedule covers a different instruction count";
    std::vector<std::pair<std::int64_t, std::size_t>> usage;  // (cycle, slot class)
    for (const auto& ins : dag) {
        const auto t = result.cycle_of[ins.id];
        if (t < 0) return "instruction " + std::to_string(ins.id) + " never issued";
        for (const auto& d : ins.predecessors) {
            if (t < result.cycle_of[d.id] + d.delay) {
                return "instruction " + std::to_string(ins.id) + " at cycle " + std::to_string(t) +
                       " violates delay " + std::to_string(d.delay) + " after " +
                       std::to_string(d.id) + " at cycle " + std::to_string(result.cycle_of[d.id]);
            }
        }
        usage.emplace_back(t, static_cast<std::size_t>(ins.slot));
    }
    std::sort(usage.begin(), usage.end());
    for (std::size_t i = 0; i < usage.size();) {
        std::size_t j = i;
        while (j < usage.size() && usage[j] == usage[i]) ++j;
        const auto count = static_cast<std::int64_t>(j - i);
        if (count > slots[usage[i].second]) {
            return "cycle " + std::to_string(usage[i].first) + " issues " + std::to_string(count) +
                   " " + std::string(to_string(static_cast<SlotClass>(usage[i].second))) +
                   " instructions on " + std::to_string(slots[usage[i].second]) + " slots";
        }
        i = j;
    }
    return std::nullopt;
}

MicrokernelSpec matched_spec(const MicrokernelSpec& spec, const DagOptions& options) {
    MicrokernelSpec m = spec;
    m.r_load = effective_r_load(spec, options.share_inputs);
    if (spec.steady_unaligned) m.r_load *= 2;
    return m;
}

std::optional<std::string> check_bounds(const MicrokernelSpec& spec, const DagOptions& options,
                                        const ScheduleResult& result) {
    const auto b = latency_bounds(matched_spec(spec, options));
    auto beats = [&](const char* what, std::int64_t bound, std::int64_t simulated) {
        return what + std::string(" bound ") + std::to_string(bound) + " exceeds simulated " +
               std::to_string(simulated);
    };
    if (spec.n_clusters > 0 && result.phase_times.prolog < b.t_prolog) {
        return beats("prolog", b.t_prolog, result.phase_times.prolog);
    }
    if (result.total_cycles < b.l_total_overlapped) {
        return beats("overlapped total", b.l_total_overlapped, result.total_cycles);
    }
    if (!options.overlap_clusters && result.total_cycles < b.l_total_sequential) {
        return beats("sequential total", b.l_total_sequential, result.total_cycles);
    }
    // The mean gap may be 0 with u_vmac > 1, so check the issue window instead.
    if (const auto& v = result.steady_vmac_cycles; v.size() >= 2) {
        const auto window = v.back() - v.front() + 1;
        if (static_cast<std::int64_t>(v.size()) > spec.u_vmac * window) {
            return std::to_string(v.size()) + " VMACs in a " + std::to_string(window) +
                   "-cycle window exceed the VMAC slots";
        }
    }
    return std::nullopt;
}

MicrokernelSpec random_microkernel(std::mt19937_64& rng) {
    auto uniform = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    MicrokernelSpec s;
    s.pipeline_depth = uniform(1, 6);
    s.u_ld = uniform(1, 3);
    s.u_st = uniform(1, 2);
    s.u_vmac = uniform(1, 2);
    s.load_classes.clear();
    const auto classes = uniform(1, 3);
    for (std::int64_t i = 0; i < classes; ++i) {
        s.load_classes.push_back({uniform(1, 10), uniform(1, 6), uniform(0, 3) == 0});
    }
    s.r_load = uniform(1, 4);
    s.accum_regs = uniform(1, 8);
    s.chains = uniform(1, s.accum_regs);
    s.n_accum = uniform(1, 12);
    s.n_clusters = uniform(1, 4);
    s.l_vmac_to_store = uniform(0, 8);
    s.l_store = uniform(1, 3);
    s.n_store = uniform(1, 3);
    s.steady_load_latency = uniform(1, 10);
    s.steady_unaligned = uniform(0, 3) == 0;
    return s;
}

}  // namespace atb
