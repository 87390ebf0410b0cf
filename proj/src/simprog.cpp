#include "leofuzz/simprog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace leofuzz {

using nlohmann::json;

bool Predicate::eval(const Bytes& input) const {
  switch (kind) {
    case PredicateKind::ByteEq:
      return offset < input.size() && input[offset] == bytes[0];
    case PredicateKind::ByteLt:
      return offset < input.size() && input[offset] < bytes[0];
    case PredicateKind::MagicBytes:
      return offset + bytes.size() <= input.size() &&
             std::equal(bytes.begin(), bytes.end(), input.begin() + offset);
    case PredicateKind::LengthGe:
      return input.size() >= length;
    case PredicateKind::Always:
      return true;
  }
  return false;
}

std::uint32_t SimProgram::index_of(const BlockId& id) const {
  auto it = block_index.find(id);
  if (it == block_index.end()) throw Error("unknown block id '" + id + "'");
  return it->second;
}

void SimProgram::set_instrumented(std::span<const TargetSequence> seqs) {
  instrumented.assign(block_ids.size(), false);
  for (const auto& ts : seqs)
    for (const auto& b : ts.blocks) instrumented[index_of(b)] = true;
}

namespace {

constexpr std::size_t kMaxPredicateOffset = 1 << 20;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw Error(origin + ": " + msg);
}

PredicateKind kind_from_name(const std::string& name, const std::string& origin) {
  if (name == "byte_eq") return PredicateKind::ByteEq;
  if (name == "byte_lt") return PredicateKind::ByteLt;
  if (name == "magic_bytes") return PredicateKind::MagicBytes;
  if (name == "length_ge") return PredicateKind::LengthGe;
  if (name == "always") return PredicateKind::Always;
  fail(origin, "unknown predicate kind '" + name + "'");
}

struct EdgeRef {
  std::uint32_t from, to;
  bool operator<(const EdgeRef& o) const {
    return from != o.from ? from < o.from : to < o.to;
  }
};

}  // namespace

SimProgram load_program(std::istream& in, const std::string& origin) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  SimProgram prog;
  {
    std::istringstream gs(text);
    prog.graphs = parse_graphs(gs, origin);
  }
  json root = json::parse(text);  // already validated as JSON above

  if (root.contains("max_steps")) {
    if (!root["max_steps"].is_number_integer() || root["max_steps"].get<long>() < 1)
      fail(origin, "'max_steps' must be a positive integer");
    prog.max_steps = root["max_steps"].get<std::size_t>();
  }

  for (const auto& fn : prog.graphs.functions)
    for (const auto& b : fn.blocks) {
      prog.block_index.emplace(b.id, static_cast<std::uint32_t>(prog.block_ids.size()));
      prog.block_ids.push_back(b.id);
    }
  const std::size_t nblocks = prog.block_ids.size();
  prog.is_crash_block.assign(nblocks, false);
  prog.entry = prog.index_of(icfg_entry(prog.graphs));

  // Out-edges in the interprocedural view: intra edges plus call edges.
  std::vector<std::vector<std::uint32_t>> outs(nblocks);
  std::set<EdgeRef> edge_exists;
  for (const auto& fn : prog.graphs.functions) {
    for (const auto& [a, b] : fn.edges) {
      EdgeRef e{prog.index_of(a), prog.index_of(b)};
      if (edge_exists.insert(e).second) outs[e.from].push_back(e.to);
    }
    for (const auto& cs : fn.calls) {
      std::uint32_t from = prog.index_of(cs.block);
      for (const auto& callee : cs.callees) {
        EdgeRef e{from, prog.index_of(prog.graphs.find_function(callee)->entry_block)};
        if (edge_exists.insert(e).second) outs[e.from].push_back(e.to);
      }
    }
  }

  struct PredEntry {
    std::uint32_t from, to;
    Predicate pred;
  };
  std::vector<PredEntry> pred_entries;
  std::set<EdgeRef> predicated;
  if (root.contains("predicates")) {
    if (!root["predicates"].is_array()) fail(origin, "'predicates' must be an array");
    for (const auto& jp : root["predicates"]) {
      if (!jp.contains("from") || !jp.contains("to") || !jp.contains("kind"))
        fail(origin, "predicate entries need 'from', 'to' and 'kind'");
      PredEntry pe;
      const std::string from_id = jp["from"].get<std::string>();
      const std::string to_id = jp["to"].get<std::string>();
      const std::string where = "predicate on " + from_id + " -> " + to_id;
      pe.from = prog.block_index.count(from_id) ? prog.index_of(from_id)
                                                : (fail(origin, where + ": unknown 'from' block"), 0);
      pe.to = prog.block_index.count(to_id) ? prog.index_of(to_id)
                                            : (fail(origin, where + ": unknown 'to' block"), 0);
      if (!edge_exists.count(EdgeRef{pe.from, pe.to}))
        fail(origin, where + ": no such edge in the graph");
      if (!predicated.insert(EdgeRef{pe.from, pe.to}).second)
        fail(origin, where + ": duplicate predicate for this edge");
      pe.pred.kind = kind_from_name(jp["kind"].get<std::string>(), origin + ": " + where);
      if (jp.contains("offset")) {
        if (!jp["offset"].is_number_integer() || jp["offset"].get<long>() < 0)
          fail(origin, where + ": 'offset' must be a non-negative integer");
        pe.pred.offset = jp["offset"].get<std::size_t>();
        if (pe.pred.offset >= kMaxPredicateOffset)
          fail(origin, where + ": 'offset' is out of bounds");
      }
      switch (pe.pred.kind) {
        case PredicateKind::ByteEq:
        case PredicateKind::ByteLt: {
          if (!jp.contains("value") || !jp["value"].is_number_integer())
            fail(origin, where + ": 'value' must be an integer byte");
          long v = jp["value"].get<long>();
          if (v < 0 || v > 255) fail(origin, where + ": 'value' must be in [0, 255]");
          pe.pred.bytes.assign(1, static_cast<std::uint8_t>(v));
          break;
        }
        case PredicateKind::MagicBytes: {
          if (!jp.contains("value") || !jp["value"].is_string())
            fail(origin, where + ": 'value' must be a string of magic bytes");
          const std::string v = jp["value"].get<std::string>();
          if (v.empty()) fail(origin, where + ": magic byte string must be non-empty");
          pe.pred.bytes.assign(v.begin(), v.end());
          break;
        }
        case PredicateKind::LengthGe: {
          if (!jp.contains("value") || !jp["value"].is_number_integer() ||
              jp["value"].get<long>() < 0)
            fail(origin, where + ": 'value' must be a non-negative length");
          pe.pred.length = jp["value"].get<std::size_t>();
          break;
        }
        case PredicateKind::Always:
          break;
      }
      pred_entries.push_back(std::move(pe));
    }
  }

  std::set<EdgeRef> defaults;
  std::vector<int> default_to(nblocks, -1);
  if (root.contains("default_edges")) {
    if (!root["default_edges"].is_array()) fail(origin, "'default_edges' must be an array");
    for (const auto& jd : root["default_edges"]) {
      if (!jd.is_array() || jd.size() != 2)
        fail(origin, "default_edges entries must be [from, to] pairs");
      std::uint32_t from = prog.index_of(jd[0].get<std::string>());
      std::uint32_t to = prog.index_of(jd[1].get<std::string>());
      const std::string where =
          "default edge " + prog.block_ids[from] + " -> " + prog.block_ids[to];
      if (!edge_exists.count(EdgeRef{from, to})) fail(origin, where + ": no such edge");
      if (predicated.count(EdgeRef{from, to}))
        fail(origin, where + ": an edge cannot be both predicated and default");
      if (default_to[from] != -1)
        fail(origin, where + ": block already has a default edge");
      default_to[from] = static_cast<int>(to);
      defaults.insert(EdgeRef{from, to});
    }
  }

  if (root.contains("crash_blocks")) {
    if (!root["crash_blocks"].is_array()) fail(origin, "'crash_blocks' must be an array");
    for (const auto& jc : root["crash_blocks"])
      prog.is_crash_block[prog.index_of(jc.get<std::string>())] = true;
  }

  // Assemble ordered successor lists: predicates in file order, default last.
  prog.succ.assign(nblocks, {});
  for (const auto& pe : pred_entries) {
    SimProgram::OutEdge oe;
    oe.to = pe.to;
    oe.pred = pe.pred;
    oe.has_pred = true;
    prog.succ[pe.from].push_back(std::move(oe));
  }
  for (std::uint32_t u = 0; u < nblocks; ++u) {
    for (std::uint32_t v : outs[u]) {
      if (predicated.count(EdgeRef{u, v}) || defaults.count(EdgeRef{u, v})) continue;
      if (outs[u].size() >= 2)
        fail(origin, "block '" + prog.block_ids[u] + "' has out-degree " +
                         std::to_string(outs[u].size()) + " but edge to '" +
                         prog.block_ids[v] + "' has neither a predicate nor a default mark");
      SimProgram::OutEdge oe;
      oe.to = v;
      prog.succ[u].push_back(std::move(oe));
    }
    if (default_to[u] != -1) {
      SimProgram::OutEdge oe;
      oe.to = static_cast<std::uint32_t>(default_to[u]);
      oe.is_default = true;
      prog.succ[u].push_back(std::move(oe));
    }
    if (outs[u].size() >= 2 && default_to[u] == -1)
      fail(origin, "block '" + prog.block_ids[u] +
                       "' branches but designates no default edge");
  }

  std::uint32_t next_edge = 0;
  for (std::uint32_t u = 0; u < nblocks; ++u)
    for (auto& oe : prog.succ[u]) {
      oe.edge_id = next_edge++;
      prog.edge_pairs.emplace_back(u, oe.to);
    }
  return prog;
}

SimProgram load_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open for reading");
  return load_program(in, path);
}

void execute_into(const SimProgram& prog, const Bytes& input, RawExecResult& out) {
  out.raw_blocks.clear();
  out.filtered.clear();
  out.edge_ids.clear();
  out.crashed_at.reset();
  out.steps = 0;
  out.hit_step_limit = false;

  const bool filter = !prog.instrumented.empty();
  std::uint32_t u = prog.entry;
  while (true) {
    if (out.steps >= prog.max_steps) {
      out.hit_step_limit = true;
      break;
    }
    ++out.steps;
    out.raw_blocks.push_back(u);
    if (!filter || prog.instrumented[u]) out.filtered.push_back(u);
    if (prog.is_crash_block[u]) {
      out.crashed_at = u;
      break;
    }
    const SimProgram::OutEdge* taken = nullptr;
    for (const auto& oe : prog.succ[u]) {
      if (!oe.has_pred || oe.pred.eval(input)) {
        taken = &oe;
        break;
      }
    }
    if (!taken) break;  // sink, or every predicate failed with no default
    out.edge_ids.push_back(taken->edge_id);
    u = taken->to;
  }
  std::sort(out.edge_ids.begin(), out.edge_ids.end());
  out.edge_ids.erase(std::unique(out.edge_ids.begin(), out.edge_ids.end()),
                     out.edge_ids.end());
}

ExecResult execute(const SimProgram& prog, const Bytes& input) {
  RawExecResult raw;
  execute_into(prog, input, raw);
  ExecResult r;
  r.steps = raw.steps;
  r.hit_step_limit = raw.hit_step_limit;
  if (raw.crashed_at) r.crashed_at = prog.block_ids[*raw.crashed_at];
  r.trace.blocks.reserve(raw.filtered.size());
  for (std::uint32_t b : raw.filtered) r.trace.blocks.push_back(prog.block_ids[b]);
  for (std::uint32_t e : raw.edge_ids) {
    const auto& [a, b] = prog.edge_pairs[e];
    r.trace.edge_set.emplace_back(prog.block_ids[a], prog.block_ids[b]);
  }
  std::sort(r.trace.edge_set.begin(), r.trace.edge_set.end());
  return r;
}

std::optional<Bytes> solve_branch(const SimProgram& prog, const Bytes& seed,
                                  const BlockId& from, const BlockId& to) {
  auto fit = prog.block_index.find(from);
  auto tit = prog.block_index.find(to);
  if (fit == prog.block_index.end() || tit == prog.block_index.end()) return std::nullopt;
  const Predicate* pred = nullptr;
  for (const auto& oe : prog.succ[fit->second])
    if (oe.to == tit->second && oe.has_pred) {
      pred = &oe.pred;
      break;
    }
  if (!pred) return std::nullopt;

  Bytes out = seed;
  switch (pred->kind) {
    case PredicateKind::ByteEq:
      if (out.size() <= pred->offset) out.resize(pred->offset + 1, 0);
      out[pred->offset] = pred->bytes[0];
      return out;
    case PredicateKind::ByteLt:
      if (pred->bytes[0] == 0) return std::nullopt;  // nothing is below zero
      if (out.size() <= pred->offset) out.resize(pred->offset + 1, 0);
      out[pred->offset] = static_cast<std::uint8_t>(pred->bytes[0] - 1);
      return out;
    case PredicateKind::MagicBytes:
      if (out.size() < pred->offset + pred->bytes.size())
        out.resize(pred->offset + pred->bytes.size(), 0);
      std::copy(pred->bytes.begin(), pred->bytes.end(), out.begin() + pred->offset);
      return out;
    case PredicateKind::LengthGe:
      if (out.size() < pred->length) out.resize(pred->length, 0);
      return out;
    case PredicateKind::Always:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace leofuzz
