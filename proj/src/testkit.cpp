#include "pgv/testkit.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "pgv/typecheck.hpp"

namespace pgv::testkit {

namespace {

// ---------------------------------------------------------------- scripts

enum class EvKind { Close, Send, Select };
enum class Payload { Chan, Unit, Sum };

struct Ev {
  EvKind kind;
  bool by_first;
  int prio;
  Payload payload = Payload::Chan;
  int chan = -1;  // payload session for Send/Chan
  bool right = false;
};

struct Chan {
  std::string n1, n2;
  int t1, t2;
  std::vector<Ev> evs;
  bool dangling = false;
  bool linked = false;  // split in two by a forwarding thread
  std::string w, z;     // the forwarder's endpoints when linked
};

struct Act {
  int chan;
  bool first;
  int ev;
};

struct Script {
  std::vector<Chan> chans;
  std::vector<std::vector<Act>> threads;
  int initial = 0;
};

class Gen {
 public:
  Gen(const GenBudget& b, bool pgv) : b_(b), pgv_(pgv), rng_(b.seed * 0x9E3779B97F4A7C15ull + (pgv ? 1 : 2)) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string name(const char* base) { return base + std::to_string(counter_++); }

  Script make() {
    Script s;
    if (b_.max_depth <= 1 || b_.max_sessions <= 0) {
      s.threads.resize(1);
      return s;
    }
    int nthreads = uniform(2, std::max(2, b_.max_sessions + 1));
    s.threads.resize(static_cast<std::size_t>(nthreads));
    int nchans = uniform(1, b_.max_sessions);
    std::vector<int> open;
    for (int i = 0; i < nchans; ++i) {
      int a = uniform(0, nthreads - 1), c = uniform(0, nthreads - 2);
      if (c >= a) ++c;
      s.chans.push_back({name("x"), name("y"), a, c, {}, false, false, {}, {}});
      open.push_back(i);
    }
    s.initial = nchans;
    int dangling = -1;
    if (pgv_ && coin(0.15)) {
      int c = uniform(1, nthreads - 1);
      s.chans.push_back({name("x"), name("y"), 0, c, {}, true, false, {}, {}});
      dangling = static_cast<int>(s.chans.size()) - 1;
      ++s.initial;
    }
    for (int i = 0; i < s.initial; ++i)
      if (!s.chans[i].dangling && coin(0.15)) {
        s.chans[i].linked = true;
        s.chans[i].w = name("w");
        s.chans[i].z = name("z");
      }

    int events = uniform(1, b_.max_depth * nchans);
    std::vector<int> offers(static_cast<std::size_t>(nthreads), 0);
    for (int e = 0; e < events && !open.empty(); ++e) {
      std::size_t pick = static_cast<std::size_t>(uniform(0, static_cast<int>(open.size()) - 1));
      int c = open[pick];
      bool first = coin(0.5);
      int receiver = first ? s.chans[c].t2 : s.chans[c].t1;
      double r = std::uniform_real_distribution<double>(0, 1)(rng_);
      if (r < 0.25) {
        emit(s, c, {EvKind::Close, first, next_prio()});
        open.erase(open.begin() + static_cast<long>(pick));
      } else if (r < 0.45 && offers[receiver] < 2) {
        ++offers[receiver];
        emit(s, c, {EvKind::Select, first, next_prio(), Payload::Chan, -1, coin(0.5)});
      } else {
        Ev ev{EvKind::Send, first, next_prio()};
        if (pgv_) ev.payload = static_cast<Payload>(uniform(0, 2));
        if (ev.payload == Payload::Chan) {
          Chan& ch = s.chans[c];
          int from = first ? ch.t1 : ch.t2, to = first ? ch.t2 : ch.t1;
          s.chans.push_back({name("y"), name("w"), from, to, {}, false, false, {}, {}});
          ev.chan = static_cast<int>(s.chans.size()) - 1;
          open.push_back(ev.chan);
        }
        emit(s, c, ev);
      }
    }
    std::shuffle(open.begin(), open.end(), rng_);
    for (int c : open) emit(s, c, {EvKind::Close, coin(0.5), next_prio()});
    if (dangling >= 0) {
      int n = uniform(1, 2);
      for (int i = 0; i < n; ++i) emit(s, dangling, {EvKind::Send, coin(0.5), next_prio(), Payload::Unit});
      emit(s, dangling, {EvKind::Close, coin(0.5), next_prio()});
    }
    return s;
  }

 private:
  int next_prio() {
    int p = prio_;
    prio_ += 2;
    return p;
  }

  void emit(Script& s, int c, Ev ev) {
    Chan& ch = s.chans[c];
    int idx = static_cast<int>(ch.evs.size());
    ch.evs.push_back(ev);
    s.threads[ch.t1].push_back({c, true, idx});
    s.threads[ch.t2].push_back({c, false, idx});
  }

  GenBudget b_;
  bool pgv_;
  std::mt19937_64 rng_;
  int counter_ = 0;
  int prio_ = 0;
};

// ---------------------------------------------------------------- PCP rendering

pcp::PTypeP pcp_type(const Script& s, int c, std::size_t i) {
  const Ev& ev = s.chans[c].evs[i];
  switch (ev.kind) {
    case EvKind::Close: return ev.by_first ? pcp::pty::one(ev.prio) : pcp::pty::bot(ev.prio);
    case EvKind::Send: {
      pcp::PTypeP a = pcp_type(s, ev.chan, 0);
      pcp::PTypeP rest = pcp_type(s, c, i + 1);
      return ev.by_first ? pcp::pty::tensor(ev.prio, a, rest) : pcp::pty::parr(ev.prio, pcp::dual(a), rest);
    }
    case EvKind::Select: {
      pcp::PTypeP rest = pcp_type(s, c, i + 1);
      return ev.by_first ? pcp::pty::plus(ev.prio, rest, rest) : pcp::pty::with(ev.prio, rest, rest);
    }
  }
  return nullptr;
}

std::string pcp_thread(const Script& s, const std::vector<Act>& acts, std::size_t i) {
  if (i == acts.size()) return "halt";
  const Act& a = acts[i];
  const Chan& ch = s.chans[a.chan];
  const Ev& ev = ch.evs[a.ev];
  const std::string& x = a.first ? ch.n1 : ch.n2;
  bool actor = ev.by_first == a.first;
  std::string rest = pcp_thread(s, acts, i + 1);
  switch (ev.kind) {
    case EvKind::Close: return x + (actor ? "[]." : "().") + rest;
    case EvKind::Send: {
      const Chan& pay = s.chans[ev.chan];
      return actor ? x + "[" + pay.n1 + "]." + rest : x + "(" + pay.n2 + ")." + rest;
    }
    case EvKind::Select:
      if (actor) return x + (ev.right ? "[inr]." : "[inl].") + rest;
      return x + " case {" + rest + "; " + rest + "}";
  }
  return rest;
}

std::string render_pcp(const Script& s) {
  if (s.threads.size() == 1 && s.chans.empty()) return "halt";
  std::ostringstream os;
  for (int c = 0; c < s.initial; ++c) {
    const Chan& ch = s.chans[c];
    pcp::PTypeP t = pcp_type(s, c, 0);
    if (ch.linked) {
      os << "(nu " << ch.n1 << " " << ch.w << " : " << pcp::to_string(t) << ") ";
      os << "(nu " << ch.z << " " << ch.n2 << " : " << pcp::to_string(t) << ") ";
    } else {
      os << "(nu " << ch.n1 << " " << ch.n2 << " : " << pcp::to_string(t) << ") ";
    }
  }
  os << "(";
  for (std::size_t t = 0; t < s.threads.size(); ++t) os << (t ? " || " : "") << pcp_thread(s, s.threads[t], 0);
  for (int c = 0; c < s.initial; ++c)
    if (s.chans[c].linked) os << " || " << s.chans[c].w << " <-> " << s.chans[c].z;
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------- PGV rendering

TypeP pgv_type(const Script& s, int c, std::size_t i) {
  const Ev& ev = s.chans[c].evs[i];
  switch (ev.kind) {
    case EvKind::Close: return ev.by_first ? ty::end_send(ev.prio) : ty::end_recv(ev.prio);
    case EvKind::Send: {
      TypeP pay = ev.payload == Payload::Unit  ? ty::unit()
                  : ev.payload == Payload::Sum ? ty::sum(ty::unit(), ty::unit())
                                               : dual(pgv_type(s, ev.chan, 0));
      TypeP rest = pgv_type(s, c, i + 1);
      return ev.by_first ? ty::send(ev.prio, pay, rest) : ty::recv(ev.prio, pay, rest);
    }
    case EvKind::Select: {
      TypeP rest = pgv_type(s, c, i + 1);
      return ev.by_first ? ty::select(ev.prio, rest, rest) : ty::offer(ev.prio, rest, rest);
    }
  }
  return nullptr;
}

TypeP pgv_type_at(const Script& s, int c, std::size_t i, bool first) {
  TypeP t = pgv_type(s, c, i);
  return first ? t : dual(t);
}

class PgvRender {
 public:
  explicit PgvRender(const Script& s, std::mt19937_64& rng) : s_(s), rng_(rng) {}

  std::string thread(std::size_t t, const std::string& tail) { return body(s_.threads[t], 0, tail, t == 0); }

 private:
  std::string fresh(const char* b) { return b + std::to_string(n_++); }

  std::string noise(const std::string& rest) {
    int r = std::uniform_int_distribution<int>(0, 9)(rng_);
    if (r == 0) {
      std::string v = fresh("v");
      return "let " + v + " = (\\(" + v + " : 1). " + v + ") () in " + v + "; " + rest;
    }
    if (r == 1) {
      std::string u = fresh("u"), a = fresh("a"), b = fresh("b");
      return "let " + u + " = case inr[1 + 1] () {inl " + a + " -> " + a + "; inr " + b + " -> " + b + "} in " + u +
             "; " + rest;
    }
    return rest;
  }

  std::string body(const std::vector<Act>& acts, std::size_t i, const std::string& tail, bool main) {
    if (i == acts.size()) return tail;
    const Act& a = acts[i];
    const Chan& ch = s_.chans[a.chan];
    if (main && ch.dangling) return body(acts, i + 1, tail, main);
    const Ev& ev = ch.evs[a.ev];
    const std::string& x = a.first ? ch.n1 : ch.n2;
    bool actor = ev.by_first == a.first;
    std::string rest = noise(body(acts, i + 1, tail, main));
    switch (ev.kind) {
      case EvKind::Close: return (actor ? "close " : "wait ") + x + "; " + rest;
      case EvKind::Send: {
        if (actor) {
          switch (ev.payload) {
            case Payload::Unit: return "let " + x + " = send ((), " + x + ") in " + rest;
            case Payload::Sum:
              return "let " + x + " = send (inl[1 + 1] (), " + x + ") in " + rest;
            case Payload::Chan: {
              const Chan& pay = s_.chans[ev.chan];
              std::string z = fresh("z");
              return "let (" + pay.n1 + ", " + z + ") = new[" + to_string(pgv_type(s_, ev.chan, 0)) +
                     "] () in let " + x + " = send (" + z + ", " + x + ") in " + rest;
            }
          }
        }
        switch (ev.payload) {
          case Payload::Unit: return "let ((), " + x + ") = recv " + x + " in " + rest;
          case Payload::Sum: {
            std::string v = fresh("v"), u = fresh("u"), l = fresh("a"), r = fresh("b");
            return "let (" + v + ", " + x + ") = recv " + x + " in let " + u + " = case " + v + " {inl " + l +
                   " -> " + l + "; inr " + r + " -> " + r + "} in " + u + "; " + rest;
          }
          case Payload::Chan: return "let (" + s_.chans[ev.chan].n2 + ", " + x + ") = recv " + x + " in " + rest;
        }
        return rest;
      }
      case EvKind::Select:
        if (actor)
          return "let " + x + " = select[" + to_string(pgv_type_at(s_, a.chan, a.ev, a.first)) + "] " +
                 (ev.right ? "inr " : "inl ") + x + " in " + rest;
        return "offer " + x + " {inl " + x + " -> " + rest + "; inr " + x + " -> " + rest + "}";
    }
    return rest;
  }

  const Script& s_;
  std::mt19937_64& rng_;
  int n_ = 0;
};

std::string render_pgv(const Script& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  std::ostringstream os;
  for (int c = 0; c < s.initial; ++c) {
    const Chan& ch = s.chans[c];
    std::string t = to_string(pgv_type(s, c, 0));
    if (ch.linked) {
      os << "let (" << ch.n1 << ", " << ch.w << ") = new[" << t << "] () in\n";
      os << "let (" << ch.z << ", " << ch.n2 << ") = new[" << t << "] () in\n";
    } else {
      os << "let (" << ch.n1 << ", " << ch.n2 << ") = new[" << t << "] () in\n";
    }
  }
  PgvRender r(s, rng);
  for (std::size_t t = 1; t < s.threads.size(); ++t) os << "spawn (\\(). " << r.thread(t, "()") << ");\n";
  for (int c = 0; c < s.initial; ++c)
    if (s.chans[c].linked) os << "spawn (\\(). link (" << s.chans[c].w << ", " << s.chans[c].z << "));\n";
  std::string value = "()";
  for (int c = 0; c < s.initial; ++c)
    if (s.chans[c].dangling) value = "((), " + s.chans[c].n1 + ")";
  os << r.thread(0, value) << "\n";
  return os.str();
}

std::string render_pure(const GenBudget& b) {
  std::mt19937_64 rng(b.seed * 0x2545F4914F6CDD1Dull);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int n = 0;
  auto fresh = [&](const char* base) { return base + std::to_string(n++); };
  auto chain = [&](int len, std::string tail) {
    for (int i = 0; i < len; ++i) {
      switch (uniform(0, 2)) {
        case 0: {
          std::string v = fresh("v");
          tail = "let " + v + " = (\\(" + v + " : 1). " + v + ") () in " + v + "; " + tail;
          break;
        }
        case 1: {
          std::string u = fresh("u"), a = fresh("a"), c = fresh("b");
          tail = "let " + u + " = case inr[1 + 1] () {inl " + a + " -> " + a + "; inr " + c + " -> " + c +
                 "} in " + u + "; " + tail;
          break;
        }
        default: {
          std::string l = fresh("l"), r = fresh("r");
          tail = "let (" + l + ", " + r + ") = ((), ()) in " + l + "; " + r + "; " + tail;
        }
      }
    }
    return tail;
  };
  std::ostringstream os;
  for (int t = uniform(0, 2); t > 0; --t) os << "spawn (\\(). " << chain(uniform(1, b.max_depth), "()") << ");\n";
  static const char* values[] = {"()", "((), ())", "inl[1 + 1] ()"};
  os << chain(b.max_depth, values[uniform(0, 2)]) << "\n";
  return os.str();
}

}  // namespace

std::string gen_pgv_source(const GenBudget& b) {
  if (b.max_sessions <= 0 && b.max_depth > 1) return render_pure(b);
  return render_pgv(Gen(b, true).make(), b.seed);
}

ConfP gen_pgv_config(const GenBudget& b) {
  return cf::main(elaborate(parse_term(gen_pgv_source(b))));
}

std::string gen_pcp_source(const GenBudget& b) { return render_pcp(Gen(b, false).make()); }

pcp::ProcP gen_pcp_process(const GenBudget& b) { return pcp::parse_process(gen_pcp_source(b)); }

GenBudget shrink(const GenBudget& failing, const std::function<bool(const GenBudget&)>& fails, int seeds) {
  GenBudget best = failing;
  for (bool progress = true; progress;) {
    progress = false;
    std::vector<GenBudget> smaller;
    for (int d = 1; d < best.max_depth; ++d) smaller.push_back({d, best.max_sessions, best.max_priority, 0});
    for (int n = 0; n < best.max_sessions; ++n) smaller.push_back({best.max_depth, n, best.max_priority, 0});
    for (auto cand : smaller) {
      for (int k = 0; k < seeds && !progress; ++k) {
        cand.seed = best.seed + static_cast<std::uint64_t>(k);
        if (fails(cand)) {
          best = cand;
          progress = true;
        }
      }
      if (progress) break;
    }
  }
  return best;
}

// ---------------------------------------------------------------- annotations

namespace {

using PrioFn = std::function<Priority(const Priority&)>;

PriorityBound map_bound(const PriorityBound& b, const PrioFn& f) {
  return b.is_fin() ? PriorityBound::fin(f(b.o)) : b;
}

TypeP map_type(const TypeP& t, const PrioFn& f) {
  if (!t) return t;
  auto c = std::make_shared<Type>(*t);
  c->o = f(t->o);
  c->p = map_bound(t->p, f);
  c->q = map_bound(t->q, f);
  c->a = map_type(t->a, f);
  c->b = map_type(t->b, f);
  return c;
}

TermP map_term(const TermP& t, const PrioFn& f) {
  auto c = std::make_shared<Term>(*t);
  c->ann = map_type(t->ann, f);
  for (auto& k : c->kids) k = map_term(k, f);
  return c;
}

ConfP map_conf(const ConfP& c, const PrioFn& f) {
  switch (c->kind) {
    case ConfKind::Thread: return cf::thread(c->flag, map_term(c->term, f), c->id);
    case ConfKind::Par: return cf::par(map_conf(c->c, f), map_conf(c->d, f));
    case ConfKind::Res: return cf::res(c->x, c->y, map_conf(c->c, f), map_type(c->ann, f));
  }
  return c;
}

Program map_program(const Program& p, const PrioFn& f) {
  if (auto t = std::get_if<TermP>(&p)) return map_term(*t, f);
  return map_conf(std::get<ConfP>(p), f);
}

std::string bound_hole(const PriorityBound& b) { return b.is_fin() ? b.o.hole : std::string(); }

}  // namespace

std::vector<std::string> holes_of(const Program& p) {
  std::vector<std::string> out;
  map_program(p, [&](const Priority& o) {
    if (o.unresolved() && std::find(out.begin(), out.end(), o.hole) == out.end()) out.push_back(o.hole);
    return o;
  });
  return out;
}

Program fill_holes(const Program& p, const std::map<std::string, int>& values) {
  return map_program(p, [&](const Priority& o) {
    if (!o.unresolved()) return o;
    auto it = values.find(o.hole);
    if (it == values.end()) return o;
    return Priority(it->second + o.offset, o.hole, o.offset);
  });
}

void check_program(const Program& p) {
  if (auto t = std::get_if<TermP>(&p)) {
    typecheck_term({}, elaborate(*t));
    return;
  }
  typecheck_config({}, elaborate(std::get<ConfP>(p)));
}

AnnotationResult find_annotations(const Program& skeleton, int k) {
  AnnotationResult res;
  std::vector<std::string> hs = holes_of(skeleton);
  std::vector<int> vals(hs.size(), 0);
  std::vector<std::pair<std::string, std::string>> violated;
  for (;;) {
    std::map<std::string, int> asg;
    for (std::size_t i = 0; i < hs.size(); ++i) asg[hs[i]] = vals[i];
    ++res.tried;
    try {
      check_program(fill_holes(skeleton, asg));
      res.sat = true;
      res.assignment = asg;
      return res;
    } catch (const TypeError& e) {
      if (e.kind == ErrorKind::PriorityViolation) {
        std::pair<std::string, std::string> c{bound_hole(e.lhs), bound_hole(e.rhs)};
        if (std::find(violated.begin(), violated.end(), c) == violated.end()) violated.push_back(c);
      }
    }
    std::size_t i = hs.size();
    while (i > 0 && vals[i - 1] == k) vals[--i] = 0;
    if (i == 0) break;
    ++vals[i - 1];
  }
  // a failed check of "a < b" means the program needs a < b; two such
  // needs in opposite directions can never hold together
  for (std::size_t i = 0; i < violated.size() && res.witness.empty(); ++i)
    for (std::size_t j = i + 1; j < violated.size(); ++j)
      if (!violated[i].first.empty() && violated[i].first == violated[j].second &&
          violated[i].second == violated[j].first) {
        res.witness = {violated[i].first + " < " + violated[i].second, violated[j].first + " < " + violated[j].second};
        break;
      }
  return res;
}

AnnotationResult find_annotations(const std::string& src, int k) { return find_annotations(parse_program(src), k); }

}  // namespace pgv::testkit
