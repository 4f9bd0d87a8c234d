#include "pgv/eval.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include <json.hpp>

namespace pgv {

// ---------------------------------------------------------------- term reduction

namespace {

enum class Focus { Value, Reduced, Ready, Stuck };

struct Decomp {
  Focus kind = Focus::Value;
  std::vector<int> path;  // reversed while unwinding, fixed up by decompose()
  TermP redex;            // Ready: the action term
  TermP result;           // Reduced: the contractum
  std::string rule;       // Reduced: rule name; Ready: constant name
};

const TermP* endpoint_arg(const TermP& action) {
  // send (V, x) acts on x; recv/close/wait x act on x
  const TermP& a = action->kids[1];
  if (action->kids[0]->k == Const::Send) {
    if (a->kind == TermKind::Pair && a->kids[1]->kind == TermKind::Var) return &a->kids[1];
    return nullptr;
  }
  return a->kind == TermKind::Var ? &a : nullptr;
}

Decomp step_rec(const TermP& m) {
  auto descend = [&](int i) {
    Decomp d = step_rec(m->kids[static_cast<std::size_t>(i)]);
    d.path.push_back(i);
    return d;
  };
  auto stuck = [] {
    Decomp d;
    d.kind = Focus::Stuck;
    return d;
  };
  auto reduced = [](TermP r, const char* rule) {
    Decomp d;
    d.kind = Focus::Reduced;
    d.result = std::move(r);
    d.rule = rule;
    return d;
  };
  switch (m->kind) {
    case TermKind::Var:
    case TermKind::Const:
    case TermKind::Lam:
    case TermKind::Unit: return {};
    case TermKind::App: {
      const TermP& f = m->kids[0];
      const TermP& a = m->kids[1];
      if (!is_value(f)) return descend(0);
      if (!is_value(a)) return descend(1);
      if (f->kind == TermKind::Lam) return reduced(substitute(f->kids[0], a, f->name), "E-Lam");
      if (f->kind == TermKind::Const) {
        bool ok = false;
        switch (f->k) {
          case Const::New: ok = a->kind == TermKind::Unit; break;
          case Const::Spawn: ok = true; break;
          case Const::Link:
            ok = a->kind == TermKind::Pair && a->kids[0]->kind == TermKind::Var &&
                 a->kids[1]->kind == TermKind::Var;
            break;
          case Const::Send:
          case Const::Recv:
          case Const::Close:
          case Const::Wait: ok = endpoint_arg(m) != nullptr; break;
        }
        if (!ok) {
          if (f->k == Const::New || f->k == Const::Link || (f->k == Const::Send && a->kind != TermKind::Pair))
            throw IllFormed("bad argument to " + std::string(const_name(f->k)) + ": " + to_string(a));
          if (a->kind != TermKind::Var && a->kind != TermKind::Pair)
            throw IllFormed("bad argument to " + std::string(const_name(f->k)) + ": " + to_string(a));
          return stuck();
        }
        Decomp d;
        d.kind = Focus::Ready;
        d.redex = m;
        d.rule = const_name(f->k);
        return d;
      }
      if (f->kind == TermKind::Var) return stuck();
      throw IllFormed("applying a non-function: " + to_string(f));
    }
    case TermKind::Seq: {
      if (!is_value(m->kids[0])) return descend(0);
      if (m->kids[0]->kind == TermKind::Unit) return reduced(m->kids[1], "E-Unit");
      if (m->kids[0]->kind == TermKind::Var) return stuck();
      throw IllFormed("sequencing a non-unit value: " + to_string(m->kids[0]));
    }
    case TermKind::Pair:
      if (!is_value(m->kids[0])) return descend(0);
      if (!is_value(m->kids[1])) return descend(1);
      return {};
    case TermKind::LetPair: {
      const TermP& s = m->kids[0];
      if (!is_value(s)) return descend(0);
      if (s->kind == TermKind::Pair)
        return reduced(substitute(substitute(m->kids[1], s->kids[0], m->name), s->kids[1], m->name2),
                       "E-Pair");
      if (s->kind == TermKind::Var) return stuck();
      throw IllFormed("splitting a non-pair: " + to_string(s));
    }
    case TermKind::Inl:
    case TermKind::Inr:
      if (!is_value(m->kids[0])) return descend(0);
      return {};
    case TermKind::Case: {
      const TermP& s = m->kids[0];
      if (!is_value(s)) return descend(0);
      if (s->kind == TermKind::Inl) return reduced(substitute(m->kids[1], s->kids[0], m->name), "E-Inl");
      if (s->kind == TermKind::Inr) return reduced(substitute(m->kids[2], s->kids[0], m->name2), "E-Inr");
      if (s->kind == TermKind::Var) return stuck();
      throw IllFormed("case on a non-injection: " + to_string(s));
    }
    case TermKind::Absurd:
      if (!is_value(m->kids[0])) return descend(0);
      return stuck();
    default: throw IllFormed("sugar in evaluated term");
  }
}

Decomp decompose(const TermP& m) {
  Decomp d = step_rec(m);
  std::reverse(d.path.begin(), d.path.end());
  return d;
}

TermP plug(const TermP& m, const std::vector<int>& path, std::size_t i, const TermP& with) {
  if (i == path.size()) return with;
  auto kids = m->kids;
  auto k = static_cast<std::size_t>(path[i]);
  kids[k] = plug(kids[k], path, i + 1, with);
  return tm::with_kids(m, std::move(kids));
}

TermP plug(const TermP& m, const std::vector<int>& path, const TermP& with) { return plug(m, path, 0, with); }

}  // namespace

std::optional<std::pair<TermP, StepLabel>> reduce_term_step(const TermP& m) {
  Decomp d = decompose(m);
  if (d.kind != Focus::Reduced) return std::nullopt;
  StepLabel l;
  l.rule = d.rule;
  l.path = d.path;
  return std::make_pair(plug(m, d.path, d.result), l);
}

Readiness is_ready(const TermP& m) {
  Decomp d = decompose(m);
  Readiness r;
  if (d.kind != Focus::Ready) return r;
  r.ready = true;
  r.what = d.rule;
  r.path = d.path;
  Const k = d.redex->kids[0]->k;
  if (k == Const::Send || k == Const::Recv || k == Const::Close || k == Const::Wait)
    r.acts_on = (*endpoint_arg(d.redex))->name;
  return r;
}

// ---------------------------------------------------------------- soups

namespace {

struct Restr {
  Name x, y;
  TypeP ann;
};

struct Thr {
  Flag flag;
  TermP term;
  unsigned id;
};

struct Soup {
  std::vector<Restr> res;
  std::vector<Thr> threads;

  unsigned next_id() const {
    unsigned m = 0;
    for (auto& t : threads) m = std::max(m, t.id + 1);
    return m;
  }
};

void flatten(const ConfP& c, Soup& s) {
  switch (c->kind) {
    case ConfKind::Thread: s.threads.push_back({c->flag, c->term, c->id}); break;
    case ConfKind::Par:
      flatten(c->c, s);
      flatten(c->d, s);
      break;
    case ConfKind::Res:
      s.res.push_back({c->x, c->y, c->ann});
      flatten(c->c, s);
      break;
  }
}

bool is_link_of(const TermP& t, const Name& a, const Name& b) {
  if (t->kind != TermKind::App || t->kids[0]->kind != TermKind::Const || t->kids[0]->k != Const::Link)
    return false;
  const TermP& p = t->kids[1];
  if (p->kind != TermKind::Pair || p->kids[0]->kind != TermKind::Var || p->kids[1]->kind != TermKind::Var)
    return false;
  const Name& u = p->kids[0]->name;
  const Name& v = p->kids[1]->name;
  return (u == a && v == b) || (u == b && v == a);
}

void tidy(Soup& s) {
  // SC-ResLink
  for (std::size_t i = 0; i < s.res.size();) {
    bool collapsed = false;
    for (auto& t : s.threads)
      if (is_link_of(t.term, s.res[i].x, s.res[i].y)) {
        t.term = tm::unit();
        collapsed = true;
        break;
      }
    if (collapsed)
      s.res.erase(s.res.begin() + static_cast<long>(i));
    else
      ++i;
  }
  // SC-ParNil
  std::erase_if(s.threads, [](const Thr& t) { return t.flag == Flag::Child && t.term->kind == TermKind::Unit; });
  std::stable_sort(s.threads.begin(), s.threads.end(), [](const Thr& a, const Thr& b) {
    if ((a.flag == Flag::Main) != (b.flag == Flag::Main)) return b.flag == Flag::Main;
    return a.id < b.id;
  });
}

Soup to_soup(const ConfP& c) {
  Soup s;
  flatten(c, s);
  std::set<unsigned> ids;
  bool dup = false;
  for (auto& t : s.threads) dup |= !ids.insert(t.id).second;
  if (dup)
    for (std::size_t i = 0; i < s.threads.size(); ++i) s.threads[i].id = static_cast<unsigned>(i);
  tidy(s);
  return s;
}

ConfP to_conf(const Soup& s) {
  ConfP body;
  for (auto it = s.threads.rbegin(); it != s.threads.rend(); ++it) {
    ConfP t = cf::thread(it->flag, it->term, it->id);
    body = body ? cf::par(t, body) : t;
  }
  if (!body) body = cf::child(tm::unit());
  for (auto it = s.res.rbegin(); it != s.res.rend(); ++it) body = cf::res(it->x, it->y, body, it->ann);
  return body;
}

const Restr* find_res(const Soup& s, const Name& n, Name* peer = nullptr) {
  for (auto& r : s.res) {
    if (r.x == n || r.y == n) {
      if (peer) *peer = r.x == n ? r.y : r.x;
      return &r;
    }
  }
  return nullptr;
}

}  // namespace

ConfP congruence_normalize(const ConfP& c) { return to_conf(to_soup(c)); }

// ---------------------------------------------------------------- configuration steps

namespace {

struct Enabled {
  StepLabel label;
  Soup next;
  bool local = false;
  PriorityBound prio = PriorityBound::top();
};

TermP endpoint_var(const TermP& action) { return *endpoint_arg(action); }

std::vector<Enabled> soup_steps(const Soup& s) {
  std::vector<Enabled> out;
  struct Act {
    std::size_t idx;
    Decomp d;
  };
  std::vector<Act> acts;
  for (std::size_t i = 0; i < s.threads.size(); ++i) {
    const Thr& th = s.threads[i];
    Decomp d = decompose(th.term);
    if (d.kind == Focus::Reduced) {
      Enabled e;
      e.label = {d.rule, th.id, d.path, {}};
      e.next = s;
      e.next.threads[i].term = plug(th.term, d.path, d.result);
      e.local = true;
      out.push_back(std::move(e));
      continue;
    }
    if (d.kind != Focus::Ready) continue;
    Const k = d.redex->kids[0]->k;
    const TermP& arg = d.redex->kids[1];
    if (k == Const::New) {
      Name x = fresh_name("x"), y = fresh_name("y");
      Enabled e;
      e.label = {"E-New", th.id, d.path, {x, y}};
      e.next = s;
      e.next.threads[i].term = plug(th.term, d.path, tm::pair(tm::var(x), tm::var(y)));
      e.next.res.push_back({x, y, d.redex->kids[0]->ann});
      e.local = true;
      out.push_back(std::move(e));
    } else if (k == Const::Spawn) {
      Enabled e;
      e.label = {"E-Spawn", th.id, d.path, {}};
      e.next = s;
      e.next.threads[i].term = plug(th.term, d.path, tm::unit());
      e.next.threads.push_back({Flag::Child, tm::app(arg, tm::unit()), s.next_id()});
      e.local = true;
      out.push_back(std::move(e));
    } else if (k == Const::Link) {
      // link (w, x) with x restricted: substitute w for the peer of x
      for (int side = 0; side < 2; ++side) {
        Name w = arg->kids[static_cast<std::size_t>(side)]->name;
        Name x = arg->kids[static_cast<std::size_t>(1 - side)]->name;
        Name y;
        const Restr* r = find_res(s, x, &y);
        if (!r || y == w) continue;
        Enabled e;
        e.label = {"E-Link", th.id, d.path, {w, x}};
        e.next = s;
        e.next.threads[i].term = plug(th.term, d.path, tm::unit());
        for (std::size_t j = 0; j < e.next.threads.size(); ++j)
          if (j != i) e.next.threads[j].term = rename_free(e.next.threads[j].term, y, w);
        std::erase_if(e.next.res, [&](const Restr& q) { return q.x == x || q.y == x; });
        e.local = true;
        out.push_back(std::move(e));
      }
    } else {
      acts.push_back({i, d});
    }
  }
  // E-Send and E-Close across a restriction
  for (auto& a : acts) {
    Const ka = a.d.redex->kids[0]->k;
    if (ka != Const::Send && ka != Const::Wait) continue;
    Name x = endpoint_var(a.d.redex)->name;
    Name y;
    const Restr* r = find_res(s, x, &y);
    if (!r) continue;
    for (auto& b : acts) {
      if (b.idx == a.idx) continue;
      Const kb = b.d.redex->kids[0]->k;
      if (endpoint_var(b.d.redex)->name != y) continue;
      const Thr& ta = s.threads[a.idx];
      const Thr& tb = s.threads[b.idx];
      Enabled e;
      e.next = s;
      e.prio = r->ann && r->ann->is_session() ? PriorityBound::fin(pr(r->ann)) : PriorityBound::top();
      if (ka == Const::Send && kb == Const::Recv) {
        TermP v = a.d.redex->kids[1]->kids[0];
        e.label = {"E-Send", ta.id, a.d.path, {x, y}};
        e.next.threads[a.idx].term = plug(ta.term, a.d.path, tm::var(x));
        e.next.threads[b.idx].term = plug(tb.term, b.d.path, tm::pair(v, tm::var(y)));
        for (auto& q : e.next.res)
          if ((q.x == x || q.y == x) && q.ann && (q.ann->kind == TypeKind::Send || q.ann->kind == TypeKind::Recv))
            q.ann = q.ann->b;
      } else if (ka == Const::Wait && kb == Const::Close) {
        e.label = {"E-Close", ta.id, a.d.path, {x, y}};
        e.next.threads[a.idx].term = plug(ta.term, a.d.path, tm::unit());
        e.next.threads[b.idx].term = plug(tb.term, b.d.path, tm::unit());
        std::erase_if(e.next.res, [&](const Restr& q) { return q.x == x || q.y == x; });
      } else {
        continue;
      }
      out.push_back(std::move(e));
    }
  }
  for (auto& e : out) tidy(e.next);
  return out;
}

}  // namespace

std::vector<std::pair<StepLabel, ConfP>> enabled_steps(const ConfP& c) {
  std::vector<std::pair<StepLabel, ConfP>> out;
  for (auto& e : soup_steps(to_soup(c))) out.emplace_back(e.label, to_conf(e.next));
  return out;
}

// ---------------------------------------------------------------- shapes and congruence

namespace {

// Serialises a term with bound names numbered canonically and every free
// name replaced by a placeholder; free occurrences are listed in order.
void shape_rec(const TermP& t, std::map<Name, int>& bound, int& counter, std::vector<Name>& frees,
               std::string& out) {
  auto bind = [&](const Name& n) { bound[n] = counter++; };
  switch (t->kind) {
    case TermKind::Var: {
      auto it = bound.find(t->name);
      if (it != bound.end()) {
        out += "b" + std::to_string(it->second);
      } else {
        out += "#";
        frees.push_back(t->name);
      }
      return;
    }
    case TermKind::Const: out += const_name(t->k); return;
    case TermKind::Unit: out += "()"; return;
    default: break;
  }
  out += "(";
  out += std::to_string(static_cast<int>(t->kind));
  if (t->kind == TermKind::Lam) bind(t->name);
  for (std::size_t i = 0; i < t->kids.size(); ++i) {
    if (t->kind == TermKind::LetPair && i == 1) {
      bind(t->name);
      bind(t->name2);
    }
    if (t->kind == TermKind::Case && i == 1) bind(t->name);
    if (t->kind == TermKind::Case && i == 2) bind(t->name2);
    out += " ";
    shape_rec(t->kids[i], bound, counter, frees, out);
  }
  out += ")";
}

struct Shape {
  std::string text;
  std::vector<Name> frees;
};

Shape shape_of(const TermP& t) {
  Shape s;
  std::map<Name, int> bound;
  int counter = 0;
  shape_rec(t, bound, counter, s.frees, s.text);
  return s;
}

// SC-LinkSwap: a thread ready on a link also matches with the arguments swapped.
std::vector<Shape> thread_shapes(const Thr& t) {
  std::vector<Shape> v{shape_of(t.term)};
  Decomp d = decompose(t.term);
  if (d.kind == Focus::Ready && d.redex->kids[0]->k == Const::Link) {
    const TermP& p = d.redex->kids[1];
    TermP swapped = tm::app(d.redex->kids[0], tm::pair(p->kids[1], p->kids[0]));
    v.push_back(shape_of(plug(t.term, d.path, swapped)));
  }
  return v;
}

struct Matcher {
  const Soup& a;
  const Soup& b;
  std::vector<std::vector<Shape>> sa, sb;
  std::map<Name, Name> ab, ba;
  std::vector<bool> taken;
  std::map<Name, Name> peer_a, peer_b;

  Matcher(const Soup& x, const Soup& y) : a(x), b(y) {
    for (auto& t : a.threads) sa.push_back(thread_shapes(t));
    for (auto& t : b.threads) sb.push_back(thread_shapes(t));
    taken.assign(b.threads.size(), false);
    for (auto& r : a.res) peer_a[r.x] = r.y, peer_a[r.y] = r.x;
    for (auto& r : b.res) peer_b[r.x] = r.y, peer_b[r.y] = r.x;
  }

  // Tries to extend the bijection; returns the pairs added so they can be undone.
  bool bind(const Name& x, const Name& y, std::vector<Name>& added) {
    auto i = ab.find(x);
    auto j = ba.find(y);
    if (i != ab.end() || j != ba.end()) return i != ab.end() && j != ba.end() && i->second == y;
    bool bx = peer_a.count(x), by = peer_b.count(y);
    if (bx != by) return false;
    if (!bx) return x == y && (ab.emplace(x, y), ba.emplace(y, x), added.push_back(x), true);
    ab.emplace(x, y);
    ba.emplace(y, x);
    added.push_back(x);
    return bind(peer_a[x], peer_b[y], added);
  }

  void undo(const std::vector<Name>& added) {
    for (auto& x : added) {
      ba.erase(ab[x]);
      ab.erase(x);
    }
  }

  bool go(std::size_t i) {
    if (i == a.threads.size()) return true;
    const Shape& s = sa[i][0];
    for (std::size_t j = 0; j < b.threads.size(); ++j) {
      if (taken[j] || b.threads[j].flag != a.threads[i].flag) continue;
      for (auto& t : sb[j]) {
        if (t.text != s.text || t.frees.size() != s.frees.size()) continue;
        std::vector<Name> added;
        bool ok = true;
        for (std::size_t k = 0; ok && k < s.frees.size(); ++k) ok = bind(s.frees[k], t.frees[k], added);
        if (ok) {
          taken[j] = true;
          if (go(i + 1)) return true;
          taken[j] = false;
        }
        undo(added);
      }
    }
    return false;
  }
};

}  // namespace

bool congruent(const ConfP& c, const ConfP& d) {
  Soup a = to_soup(c), b = to_soup(d);
  if (a.threads.size() != b.threads.size() || a.res.size() != b.res.size()) return false;
  Matcher m(a, b);
  if (!m.go(0)) return false;
  // restrictions that no thread mentions must still pair up
  std::size_t unused_a = 0, unused_b = 0;
  for (auto& r : a.res) unused_a += !m.ab.count(r.x);
  for (auto& r : b.res) unused_b += !m.ba.count(r.x);
  return unused_a == unused_b;
}

namespace {

std::string soup_key(const Soup& s) {
  std::map<Name, Name> peer;
  for (auto& r : s.res) peer[r.x] = r.y, peer[r.y] = r.x;
  std::vector<std::string> texts;
  std::map<Name, std::size_t> owner;
  for (auto& t : s.threads) {
    for (auto& f : shape_of(t.term).frees) owner.emplace(f, texts.size());
    texts.push_back(std::string(t.flag == Flag::Main ? "M" : "C") + shape_of(t.term).text);
  }
  // refine once by the shapes of the peers' threads
  std::vector<std::tuple<std::string, std::string, const Thr*>> order;
  for (std::size_t i = 0; i < s.threads.size(); ++i) {
    std::string key = texts[i];
    for (auto& f : shape_of(s.threads[i].term).frees) {
      auto pf = peer.find(f);
      auto o = pf == peer.end() ? owner.end() : owner.find(pf->second);
      key += "/" + (o == owner.end() ? std::string("-") : texts[o->second]);
    }
    order.emplace_back(key, texts[i], &s.threads[i]);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](auto& x, auto& y) { return std::get<0>(x) < std::get<0>(y); });
  std::map<Name, int> ren;
  std::string out;
  for (auto& [key, text, t] : order) {
    out += text;
    out += "[";
    for (auto& f : shape_of(t->term).frees) {
      if (!peer.count(f)) {
        out += "!" + f + ",";
        continue;
      }
      if (!ren.count(f)) {
        int n = static_cast<int>(ren.size());
        ren[f] = n;
      }
      out += std::to_string(ren[f]) + (ren.count(peer[f]) ? "~" + std::to_string(ren[peer[f]]) : "") + ",";
    }
    out += "]|";
  }
  std::vector<std::pair<int, int>> pairs;
  int unused = 0;
  for (auto& r : s.res) {
    if (!ren.count(r.x) && !ren.count(r.y)) {
      ++unused;
      continue;
    }
    int u = ren.count(r.x) ? ren[r.x] : -1, v = ren.count(r.y) ? ren[r.y] : -1;
    pairs.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(pairs.begin(), pairs.end());
  for (auto& [u, v] : pairs) out += "nu" + std::to_string(u) + "," + std::to_string(v) + ";";
  out += "unused" + std::to_string(unused);
  return out;
}

}  // namespace

std::string canonical_key(const ConfP& c) { return soup_key(to_soup(c)); }

bool is_canonical_form(const ConfP& c) {
  Soup s;
  flatten(c, s);
  // restrictions outermost over a flat spine ending in the main thread
  const Conf* cur = c.get();
  while (cur->kind == ConfKind::Res) cur = cur->c.get();
  std::function<bool(const Conf*)> no_res = [&](const Conf* k) {
    if (k->kind == ConfKind::Res) return false;
    if (k->kind == ConfKind::Par) return k->c->kind == ConfKind::Thread && no_res(k->d.get());
    return true;
  };
  if (!no_res(cur)) return false;
  int mains = 0;
  for (std::size_t i = 0; i < s.threads.size(); ++i) {
    const Thr& t = s.threads[i];
    if (t.flag == Flag::Main) {
      ++mains;
      if (i + 1 != s.threads.size()) return false;
    } else if (is_value(t.term)) {
      return false;
    }
  }
  return mains == 1;
}

namespace {

bool soup_normal(const Soup& s) {
  if (!soup_steps(s).empty()) return false;
  std::set<const Restr*> claimed;
  for (auto& t : s.threads) {
    if (t.flag == Flag::Main) {
      if (!is_value(t.term)) return false;
      continue;
    }
    Readiness r = is_ready(t.term);
    if (!r.ready || !r.acts_on) return false;
    const Restr* q = find_res(s, *r.acts_on);
    if (!q || !claimed.insert(q).second) return false;
  }
  return true;
}

}  // namespace

bool is_normal_form(const ConfP& c) { return soup_normal(to_soup(c)); }

// ---------------------------------------------------------------- running

std::optional<SchedulerPolicy> parse_policy(const std::string& s) {
  if (s == "min-priority") return SchedulerPolicy::min_priority();
  auto colon = s.find(':');
  if (colon == std::string::npos) return std::nullopt;
  std::string head = s.substr(0, colon), arg = s.substr(colon + 1);
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(arg, &used);
    if (used != arg.size()) return std::nullopt;
    if (head == "random") return SchedulerPolicy::random(v);
    if (head == "exhaustive") return SchedulerPolicy::exhaustive(static_cast<int>(v));
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

namespace {

RunOutcome finish(const Soup& s) {
  RunOutcome o;
  o.config = to_conf(s);
  if (s.res.empty() && s.threads.size() == 1 && s.threads[0].flag == Flag::Main && is_value(s.threads[0].term)) {
    o.kind = RunOutcome::Kind::Value;
    o.value = s.threads[0].term;
  } else if (s.res.empty() && s.threads.empty()) {
    o.kind = RunOutcome::Kind::Value;
    o.value = tm::unit();
  } else {
    o.kind = RunOutcome::Kind::NormalForm;
  }
  return o;
}

std::size_t pick_min_priority(const std::vector<Enabled>& steps) {
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (steps[i].local) return i;
  std::size_t best = 0;
  for (std::size_t i = 1; i < steps.size(); ++i)
    if (steps[i].prio < steps[best].prio) best = i;
  return best;
}

std::pair<RunOutcome, Trace> run_exhaustive(const ConfP& c, int depth, int fuel, const StepHook& hook) {
  struct Node {
    Soup s;
    int parent;
    StepLabel label;
    int depth;
  };
  std::vector<Node> nodes;
  nodes.push_back({to_soup(c), -1, {}, 0});
  std::unordered_set<std::string> seen{soup_key(nodes[0].s)};
  std::deque<int> queue{0};
  int terminal = -1;
  int expanded = 0;
  bool cut = false;
  while (!queue.empty()) {
    int i = queue.front();
    queue.pop_front();
    auto steps = soup_steps(nodes[static_cast<std::size_t>(i)].s);
    if (steps.empty()) {
      if (!soup_normal(nodes[static_cast<std::size_t>(i)].s))
        throw StuckNotNormal("stuck outside normal form", to_conf(nodes[static_cast<std::size_t>(i)].s));
      if (terminal < 0) terminal = i;
      continue;
    }
    if (nodes[static_cast<std::size_t>(i)].depth >= depth || ++expanded > fuel) {
      cut = true;
      continue;
    }
    for (auto& e : steps) {
      std::string k = soup_key(e.next);
      if (!seen.insert(k).second) continue;
      nodes.push_back({std::move(e.next), i, e.label, nodes[static_cast<std::size_t>(i)].depth + 1});
      queue.push_back(static_cast<int>(nodes.size() - 1));
    }
  }
  Trace tr;
  tr.initial = congruence_normalize(c);
  int end = terminal >= 0 ? terminal : 0;
  std::vector<int> chain;
  for (int i = end; i > 0; i = nodes[static_cast<std::size_t>(i)].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  for (int i : chain) {
    TraceStep st{nodes[static_cast<std::size_t>(i)].label, to_conf(nodes[static_cast<std::size_t>(i)].s)};
    if (hook) hook(st);
    tr.steps.push_back(st);
  }
  RunOutcome o = finish(nodes[static_cast<std::size_t>(end)].s);
  if (terminal < 0 || cut) {
    if (terminal < 0) o.kind = RunOutcome::Kind::FuelExhausted;
  }
  return {o, tr};
}

}  // namespace

std::pair<RunOutcome, Trace> run(const ConfP& c, const SchedulerPolicy& policy, int fuel, const StepHook& hook) {
  if (policy.kind == SchedulerPolicy::Kind::Exhaustive) return run_exhaustive(c, policy.depth, fuel, hook);
  std::mt19937_64 rng(policy.seed);
  Soup s = to_soup(c);
  Trace tr;
  tr.initial = to_conf(s);
  for (int n = 0;; ++n) {
    auto steps = soup_steps(s);
    if (steps.empty()) {
      if (!soup_normal(s)) throw StuckNotNormal("stuck outside normal form", to_conf(s));
      return {finish(s), tr};
    }
    if (n >= fuel) {
      RunOutcome o;
      o.kind = RunOutcome::Kind::FuelExhausted;
      o.config = to_conf(s);
      return {o, tr};
    }
    std::size_t pick = 0;
    if (policy.kind == SchedulerPolicy::Kind::MinPriorityFirst) {
      pick = pick_min_priority(steps);
    } else {
      std::uniform_int_distribution<std::size_t> dist(0, steps.size() - 1);
      pick = dist(rng);
    }
    s = std::move(steps[pick].next);
    TraceStep st{steps[pick].label, to_conf(s)};
    if (hook) hook(st);
    tr.steps.push_back(std::move(st));
  }
}

std::string trace_to_json(const Trace& t, int indent) {
  nlohmann::json j;
  j["initial"] = to_string(t.initial);
  j["steps"] = nlohmann::json::array();
  for (auto& s : t.steps) {
    std::string focus = "thread " + std::to_string(s.label.thread);
    if (!s.label.path.empty()) {
      focus += " at ";
      for (std::size_t i = 0; i < s.label.path.size(); ++i)
        focus += (i ? "." : "") + std::to_string(s.label.path[i]);
    }
    j["steps"].push_back({{"rule", s.label.rule},
                          {"focus", focus},
                          {"names", s.label.names},
                          {"config", to_string(s.config)}});
  }
  return j.dump(indent);
}

}  // namespace pgv
