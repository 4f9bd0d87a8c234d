#include "pgv/typecheck.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "pgv/parse.hpp"

namespace pgv {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::UnboundName: return "UnboundName";
    case ErrorKind::NonLinearUse: return "NonLinearUse";
    case ErrorKind::EnvOverlap: return "EnvOverlap";
    case ErrorKind::PriorityViolation: return "PriorityViolation";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::MainMainClash: return "MainMainClash";
    case ErrorKind::DualityMismatch: return "DualityMismatch";
    case ErrorKind::SchemaInstantiationFailure: return "SchemaInstantiationFailure";
    case ErrorKind::MissingAnnotation: return "MissingAnnotation";
    case ErrorKind::IllFormedType: return "IllFormedType";
  }
  return "?";
}

namespace {

void print_derivation(std::ostream& os, const Derivation& d, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  os << pad << d.rule << ": " << d.judgement << '\n';
  for (auto& c : d.checks)
    os << pad << "  [" << (c.ok ? "ok" : "FAIL") << "] " << c.constraint << "  (" << describe(c.lhs)
       << " vs " << describe(c.rhs) << ")\n";
  for (auto& k : d.kids) print_derivation(os, *k, depth + 1);
}

bool check_holds(const ConstraintCheck& c) {
  if (c.constraint.find(" = ") != std::string::npos) return c.lhs == c.rhs;
  return c.lhs < c.rhs;
}

}  // namespace

std::string to_string(const Derivation& d) {
  std::ostringstream os;
  print_derivation(os, d, 0);
  return os.str();
}

bool replay(const Derivation& d) {
  for (auto& c : d.checks)
    if (!check_holds(c)) return false;
  for (auto& k : d.kids)
    if (!replay(*k)) return false;
  return true;
}

TypeP instantiate_constant(Const k, const TypeP& arg) {
  auto fail = [&](const std::string& why) -> TypeP {
    throw TypeError(ErrorKind::SchemaInstantiationFailure,
                    std::string("cannot instantiate ") + const_name(k) + " at " + to_string(arg) +
                        ": " + why);
  };
  if (!arg) fail("no argument type");
  switch (k) {
    case Const::Link: {
      if (arg->kind != TypeKind::Prod || !arg->a->is_session() || !arg->b->is_session())
        return fail("expected a pair of session types");
      if (!type_equal(arg->b, dual(arg->a)))
        throw TypeError(ErrorKind::DualityMismatch, "link needs dual endpoints, got " +
                                                        to_string(arg->a) + " and " +
                                                        to_string(arg->b));
      return ty::pure_fn(arg, ty::unit());
    }
    case Const::New:
      if (!arg->is_session()) return fail("new needs a session type");
      return ty::pure_fn(ty::unit(), ty::prod(arg, dual(arg)));
    case Const::Spawn:
      if (arg->kind != TypeKind::Fn || arg->a->kind != TypeKind::Unit ||
          arg->b->kind != TypeKind::Unit)
        return fail("spawn needs a function from 1 to 1");
      return ty::pure_fn(arg, ty::unit());
    case Const::Send: {
      if (arg->kind != TypeKind::Prod || arg->b->kind != TypeKind::Send)
        return fail("send needs a pair of a value and a sending endpoint");
      if (!type_equal(arg->a, arg->b->a))
        return fail("payload " + to_string(arg->a) + " does not match " + to_string(arg->b->a));
      return ty::fn(PriorityBound::top(), PriorityBound::fin(arg->b->o), arg, arg->b->b);
    }
    case Const::Recv:
      if (arg->kind != TypeKind::Recv) return fail("recv needs a receiving endpoint");
      return ty::fn(PriorityBound::top(), PriorityBound::fin(arg->o), arg,
                    ty::prod(arg->a, arg->b));
    case Const::Close:
      if (arg->kind != TypeKind::EndS) return fail("close needs an end! endpoint");
      return ty::fn(PriorityBound::top(), PriorityBound::fin(arg->o), arg, ty::unit());
    case Const::Wait:
      if (arg->kind != TypeKind::EndR) return fail("wait needs an end? endpoint");
      return ty::fn(PriorityBound::top(), PriorityBound::fin(arg->o), arg, ty::unit());
  }
  return fail("unknown constant");
}

namespace {

struct R {
  TypeP ty;
  PriorityBound bound;
  bool slack = false;
  std::size_t lb = 0, le = 0;  // slice of the consumption log
  std::size_t bs = 0;          // names bound after this mark are local
  DerivationP d;
};

class Checker {
 public:
  explicit Checker(bool deriv) : deriv_(deriv) {}

  std::map<Name, TypeP> avail;
  std::vector<std::pair<Name, TypeP>> log;
  std::set<Name> used;
  std::map<Name, std::size_t> bind_order;
  std::size_t binds = 0;

  void add(const Name& x, const TypeP& t, Span sp) {
    if (avail.count(x) || used.count(x))
      throw TypeError(ErrorKind::EnvOverlap, "name " + x + " is bound twice", sp);
    avail[x] = t;
    bind_order[x] = ++binds;
  }

  // Free names consumed between two log positions.
  TypeEnv slice(std::size_t b, std::size_t e, std::size_t bs) const {
    TypeEnv env;
    for (std::size_t i = b; i < e; ++i)
      if (bind_order.at(log[i].first) <= bs) env.entries.push_back(log[i]);
    return env;
  }
  TypeEnv slice(const R& r) const { return slice(r.lb, r.le, r.bs); }

  void ingress(const TypeP& t, Span sp) {
    if (has_unresolved_priority(t))
      throw TypeError(ErrorKind::IllFormedType, "type " + to_string(t) + " has unfilled priority holes", sp);
    if (auto e = check_well_formed(t)) throw TypeError(ErrorKind::IllFormedType, *e, sp);
  }

  void less(Derivation* d, const char* rule, const std::string& constraint, const PriorityBound& lhs,
            const PriorityBound& rhs, Span sp) {
    bool ok = lhs < rhs;
    if (d) d->checks.push_back({constraint, lhs, rhs, ok});
    if (!ok) {
      TypeError e(ErrorKind::PriorityViolation,
                  std::string(rule) + ": side condition " + constraint + " fails (" + describe(lhs) +
                      " is not below " + describe(rhs) + ")",
                  sp);
      e.constraint = constraint;
      e.lhs = lhs;
      e.rhs = rhs;
      e.rule = rule;
      throw e;
    }
  }

  void same_type(const TypeP& expected, const TypeP& found, const char* where, Span sp) {
    if (!type_equal(expected, found))
      throw TypeError(ErrorKind::TypeMismatch,
                      std::string(where) + ": expected " + to_string(expected) + " but found " +
                          to_string(found),
                      sp);
  }

  DerivationP node(const char* rule) {
    if (!deriv_) return nullptr;
    auto d = std::make_shared<Derivation>();
    d->rule = rule;
    return d;
  }

  void finish(R& r, const TermP& m, std::vector<R*> kids) {
    if (!r.d) return;
    r.d->judgement = to_string(slice(r)) + " |-" + to_string(r.bound) + " " +
                     to_string(m) + " : " + to_string(r.ty);
    for (auto* k : kids)
      if (k->d) r.d->kids.push_back(k->d);
  }

  // Consumes a bound name inside a scope; absent names are fine when a
  // slack sub-derivation may have absorbed them.
  void close_scope(const Name& x, bool slack, Span sp) {
    if (avail.count(x)) {
      if (!slack)
        throw TypeError(ErrorKind::NonLinearUse, "linear name " + x + " is never used", sp);
      avail.erase(x);
      used.insert(x);
    }
  }

  R check(const TermP& m, const TypeP& hint) {
    R r;
    r.lb = log.size();
    r.bs = binds;
    Span sp = m->span;
    switch (m->kind) {
      case TermKind::Var: {
        auto it = avail.find(m->name);
        if (it == avail.end()) {
          if (used.count(m->name))
            throw TypeError(ErrorKind::NonLinearUse, "linear name " + m->name + " is used more than once", sp);
          throw TypeError(ErrorKind::UnboundName, "unbound name " + m->name, sp);
        }
        r.ty = it->second;
        log.emplace_back(m->name, it->second);
        used.insert(m->name);
        avail.erase(it);
        r.bound = PriorityBound::bot();
        r.d = node("T-Var");
        break;
      }
      case TermKind::Const: {
        TypeP arg;
        if (m->k == Const::New) {
          arg = m->ann;
          if (!arg && hint && hint->kind == TypeKind::Fn && hint->b && hint->b->kind == TypeKind::Prod)
            arg = hint->b->a;
          if (!arg) throw TypeError(ErrorKind::MissingAnnotation, "new needs a session type annotation", sp);
          ingress(arg, sp);
        } else if (hint && hint->kind == TypeKind::Fn) {
          arg = hint->a;
        } else {
          throw TypeError(ErrorKind::MissingAnnotation,
                          std::string("cannot determine the instance of ") + const_name(m->k), sp);
        }
        r.ty = instantiate_constant(m->k, arg);
        r.bound = PriorityBound::bot();
        r.d = node("T-Const");
        break;
      }
      case TermKind::Lam: {
        TypeP t = m->ann;
        if (!t && hint && hint->kind == TypeKind::Fn) t = hint->a;
        if (!t) throw TypeError(ErrorKind::MissingAnnotation, "cannot determine the type of binder " + m->name, sp);
        ingress(t, sp);
        add(m->name, t, sp);
        R body = check(m->kids[0], hint && hint->kind == TypeKind::Fn ? hint->b : nullptr);
        close_scope(m->name, body.slack, sp);
        TypeEnv gamma = slice(body.lb, log.size(), r.bs);
        r.ty = ty::fn(minpr(gamma), body.bound, t, body.ty);
        r.bound = PriorityBound::bot();
        r.slack = body.slack;
        r.d = node("T-Lam");
        r.le = log.size();
        finish(r, m, {&body});
        return r;
      }
      case TermKind::App: return check_app(m, hint);
      case TermKind::Unit:
        r.ty = ty::unit();
        r.bound = PriorityBound::bot();
        r.d = node("T-Unit");
        break;
      case TermKind::Seq: {
        R a = check(m->kids[0], ty::unit());
        same_type(ty::unit(), a.ty, "T-LetUnit", sp);
        R b = check(m->kids[1], hint);
        r.d = node("T-LetUnit");
        less(r.d.get(), "T-LetUnit", "p < minpr(Delta)", a.bound, minpr(slice(b)), sp);
        r.ty = b.ty;
        r.bound = join(a.bound, b.bound);
        r.slack = a.slack || b.slack;
        r.le = log.size();
        finish(r, m, {&a, &b});
        return r;
      }
      case TermKind::Pair: {
        bool h = hint && hint->kind == TypeKind::Prod;
        R a = check(m->kids[0], h ? hint->a : nullptr);
        R b = check(m->kids[1], h ? hint->b : nullptr);
        r.d = node("T-Pair");
        less(r.d.get(), "T-Pair", "p < minpr(Delta)", a.bound, minpr(slice(b)), sp);
        r.ty = ty::prod(a.ty, b.ty);
        r.bound = join(a.bound, b.bound);
        r.slack = a.slack || b.slack;
        r.le = log.size();
        finish(r, m, {&a, &b});
        return r;
      }
      case TermKind::LetPair: {
        R a = check(m->kids[0], nullptr);
        if (a.ty->kind != TypeKind::Prod)
          throw TypeError(ErrorKind::TypeMismatch, "T-LetPair: expected a product but found " + to_string(a.ty), sp);
        add(m->name, a.ty->a, sp);
        add(m->name2, a.ty->b, sp);
        R b = check(m->kids[1], hint);
        close_scope(m->name, b.slack, sp);
        close_scope(m->name2, b.slack, sp);
        TypeEnv delta = slice(b.lb, log.size(), r.bs);
        r.d = node("T-LetPair");
        less(r.d.get(), "T-LetPair", "p < minpr(Delta, T, T')", a.bound,
             meet(minpr(delta), meet(minpr(a.ty->a), minpr(a.ty->b))), sp);
        r.ty = b.ty;
        r.bound = join(a.bound, b.bound);
        r.slack = a.slack || b.slack;
        r.le = log.size();
        finish(r, m, {&a, &b});
        return r;
      }
      case TermKind::Inl:
      case TermKind::Inr: {
        bool left = m->kind == TermKind::Inl;
        TypeP st = m->ann;
        if (!st && hint && hint->kind == TypeKind::Sum) st = hint;
        if (!st) throw TypeError(ErrorKind::MissingAnnotation, "cannot determine the sum type of an injection", sp);
        if (st->kind != TypeKind::Sum)
          throw TypeError(ErrorKind::TypeMismatch, "injection annotated with non-sum " + to_string(st), sp);
        ingress(st, sp);
        R a = check(m->kids[0], left ? st->a : st->b);
        const char* rule = left ? "T-Inl" : "T-Inr";
        same_type(left ? st->a : st->b, a.ty, rule, sp);
        r.d = node(rule);
        auto lt = minpr(st->a), rt = minpr(st->b);
        bool ok = lt == rt;
        if (r.d) r.d->checks.push_back({"minpr(T) = minpr(U)", lt, rt, ok});
        if (!ok) {
          TypeError e(ErrorKind::PriorityViolation,
                      std::string(rule) + ": side condition minpr(T) = minpr(U) fails (" + describe(lt) +
                          " vs " + describe(rt) + ")",
                      sp);
          e.constraint = "minpr(T) = minpr(U)";
          e.lhs = lt;
          e.rhs = rt;
          e.rule = rule;
          throw e;
        }
        r.ty = st;
        r.bound = a.bound;
        r.slack = a.slack;
        r.le = log.size();
        finish(r, m, {&a});
        return r;
      }
      case TermKind::Case: return check_case(m, hint);
      case TermKind::Absurd: {
        R a = check(m->kids[0], nullptr);
        same_type(ty::void_(), a.ty, "T-Absurd", sp);
        TypeP t = m->ann ? m->ann : hint;
        if (!t) throw TypeError(ErrorKind::MissingAnnotation, "cannot determine the result type of absurd", sp);
        ingress(t, sp);
        r.d = node("T-Absurd");
        r.ty = t;
        r.bound = a.bound;
        r.slack = true;
        r.le = log.size();
        finish(r, m, {&a});
        return r;
      }
      default: throw TypeError(ErrorKind::TypeMismatch, "sugar must be elaborated before checking", sp);
    }
    r.le = log.size();
    finish(r, m, {});
    return r;
  }

  R check_app(const TermP& m, const TypeP& hint) {
    Span sp = m->span;
    const TermP& f = m->kids[0];
    const TermP& a = m->kids[1];
    R fr, ar;
    TypeP fty;
    if (f->kind == TermKind::Const) {
      TypeP arg_hint;
      if (f->k == Const::Spawn)
        arg_hint = ty::fn(PriorityBound::top(), PriorityBound::bot(), ty::unit(), ty::unit());
      if (f->k == Const::New) arg_hint = ty::unit();
      ar = check(a, arg_hint);
      TypeP inst_arg = ar.ty;
      if (f->k == Const::New) {
        same_type(ty::unit(), ar.ty, "new", sp);
        inst_arg = f->ann;
        if (!inst_arg && hint && hint->kind == TypeKind::Prod) inst_arg = hint->a;
        if (!inst_arg) throw TypeError(ErrorKind::MissingAnnotation, "new needs a session type annotation", sp);
        ingress(inst_arg, sp);
      }
      try {
        fty = instantiate_constant(f->k, inst_arg);
      } catch (TypeError& e) {
        e.span = sp;
        throw;
      }
      fr.ty = fty;
      fr.bound = PriorityBound::bot();
      fr.lb = fr.le = log.size();
      fr.d = node("T-Const");
      if (fr.d) fr.d->judgement = std::string("{} |-bot ") + const_name(f->k) + " : " + to_string(fty);
    } else if (f->kind == TermKind::Lam && !f->ann) {
      ar = check(a, nullptr);
      fr = check(f, ty::fn(PriorityBound::top(), PriorityBound::bot(), ar.ty, hint ? hint : ty::unit()));
      fty = fr.ty;
    } else {
      fr = check(f, nullptr);
      fty = fr.ty;
      if (fty->kind != TypeKind::Fn)
        throw TypeError(ErrorKind::TypeMismatch, "T-App: applying a non-function of type " + to_string(fty), sp);
      ar = check(a, fty->a);
    }
    same_type(fty->a, ar.ty, "T-App argument", sp);
    R r;
    r.lb = std::min(fr.lb, ar.lb);
    r.bs = std::min(fr.bs, ar.bs);
    r.d = node("T-App");
    less(r.d.get(), "T-App", "p < minpr(Delta)", fr.bound, minpr(slice(ar)), sp);
    less(r.d.get(), "T-App", "q < p'", ar.bound, fty->p, sp);
    r.ty = fty->b;
    r.bound = join(join(fr.bound, ar.bound), fty->q);
    r.slack = fr.slack || ar.slack;
    r.le = log.size();
    finish(r, m, {&fr, &ar});
    return r;
  }

  R check_case(const TermP& m, const TypeP& hint) {
    Span sp = m->span;
    R l = check(m->kids[0], nullptr);
    if (l.ty->kind != TypeKind::Sum)
      throw TypeError(ErrorKind::TypeMismatch, "T-CaseSum: expected a sum but found " + to_string(l.ty), sp);
    auto saved_avail = avail;
    auto saved_used = used;
    std::size_t mark = log.size();
    std::size_t bmark = binds;

    add(m->name, l.ty->a, sp);
    R b1 = check(m->kids[1], hint);
    close_scope(m->name, b1.slack, sp);
    auto log1 = std::vector<std::pair<Name, TypeP>>(log.begin() + static_cast<long>(mark), log.end());
    auto avail1 = avail;
    auto used1 = used;
    log.resize(mark);
    avail = saved_avail;
    used = saved_used;

    add(m->name2, l.ty->b, sp);
    R b2 = check(m->kids[2], hint ? hint : b1.ty);
    close_scope(m->name2, b2.slack, sp);
    auto log2 = std::vector<std::pair<Name, TypeP>>(log.begin() + static_cast<long>(mark), log.end());

    same_type(b1.ty, b2.ty, "T-CaseSum branches", sp);

    auto names = [&](const std::vector<std::pair<Name, TypeP>>& lg, const Name& drop) {
      std::set<Name> s;
      for (auto& e : lg)
        if (e.first != drop && bind_order.at(e.first) <= bmark) s.insert(e.first);
      return s;
    };
    auto s1 = names(log1, m->name), s2 = names(log2, m->name2);
    bool subset12 = std::includes(s2.begin(), s2.end(), s1.begin(), s1.end());
    bool subset21 = std::includes(s1.begin(), s1.end(), s2.begin(), s2.end());
    bool ok = (s1 == s2) || (b1.slack && subset12) || (b2.slack && subset21) || (b1.slack && b2.slack);
    if (!ok)
      throw TypeError(ErrorKind::NonLinearUse, "T-CaseSum: branches use different linear names", sp);

    // Keep the consumption of the branch that used more; a slack branch
    // absorbs whatever the other consumed.
    bool keep_second = s2.size() >= s1.size();
    if (!keep_second) {
      log.resize(mark);
      log.insert(log.end(), log1.begin(), log1.end());
      avail = avail1;
      used = used1;
      if (avail.count(m->name2) == 0) used.insert(m->name2);
    } else {
      used.insert(m->name);
    }
    std::set<Name> keep = keep_second ? s2 : s1;
    for (auto& n : keep) {
      avail.erase(n);
      used.insert(n);
    }

    TypeEnv delta;
    for (std::size_t i = mark; i < log.size(); ++i)
      if (bind_order.at(log[i].first) <= bmark) delta.entries.push_back(log[i]);

    R r;
    r.lb = l.lb;
    r.bs = l.bs;
    r.d = node("T-CaseSum");
    less(r.d.get(), "T-CaseSum", "p < minpr(Delta)", l.bound, minpr(delta), sp);
    r.ty = b1.ty;
    r.bound = join(l.bound, join(b1.bound, b2.bound));
    r.slack = l.slack || (b1.slack && b2.slack);
    r.le = log.size();
    finish(r, m, {&l, &b1, &b2});
    return r;
  }

  bool deriv_;
};

TermTyping run_term(Checker& ck, const TypeEnv& env, const TermP& m0, const TypeP& expected) {
  TermP m = is_core(m0) ? m0 : elaborate(m0);
  for (auto& [x, t] : env.entries) {
    ck.ingress(t, {});
    ck.add(x, t, {});
  }
  R r = ck.check(m, expected);
  if (!ck.avail.empty() && !r.slack)
    throw TypeError(ErrorKind::NonLinearUse, "linear name " + ck.avail.begin()->first + " is never used", m->span);
  TermTyping out;
  out.env_used = env;
  out.ty = r.ty;
  out.bound = r.bound;
  out.derivation = r.d;
  return out;
}

}  // namespace

TermTyping typecheck_term(const TypeEnv& env, const TermP& m, const TypeP& expected, bool want_derivation) {
  Checker ck(want_derivation);
  return run_term(ck, env, m, expected);
}

std::variant<TermTyping, TypeError> try_typecheck_term(const TypeEnv& env, const TermP& m, const TypeP& expected) {
  try {
    return typecheck_term(env, m, expected);
  } catch (TypeError& e) {
    return e;
  }
}

namespace {

TypeP find_binder_type(const Name& x, const TermP& t) {
  if (t->kind == TermKind::App && t->kids[1]->kind == TermKind::Var && t->kids[1]->name == x &&
      t->kids[0]->kind == TermKind::Lam && t->kids[0]->ann)
    return t->kids[0]->ann;
  for (auto& k : t->kids)
    if (auto r = find_binder_type(x, k)) return r;
  return nullptr;
}

TypeP find_in_conf(const Name& x, const ConfP& c) {
  switch (c->kind) {
    case ConfKind::Thread: return find_binder_type(x, c->term);
    case ConfKind::Par:
      if (auto r = find_in_conf(x, c->c)) return r;
      return find_in_conf(x, c->d);
    case ConfKind::Res: return find_in_conf(x, c->c);
  }
  return nullptr;
}

struct ConfChecker {
  Checker ck;
  explicit ConfChecker(bool d) : ck(d) {}

  std::pair<Flag, DerivationP> check(const ConfP& c) {
    switch (c->kind) {
      case ConfKind::Thread: {
        TermP m = is_core(c->term) ? c->term : elaborate(c->term);
        R r = ck.check(m, c->flag == Flag::Child ? ty::unit() : nullptr);
        DerivationP d;
        if (c->flag == Flag::Child) ck.same_type(ty::unit(), r.ty, "T-Child", m->span);
        if (ck.deriv_) {
          d = std::make_shared<Derivation>();
          d->rule = c->flag == Flag::Main ? "T-Main" : "T-Child";
          d->judgement = to_string(ck.slice(r)) + " |-" + flag_name(c->flag) + " " + to_string(c);
          if (r.d) d->kids.push_back(r.d);
        }
        return {c->flag, d};
      }
      case ConfKind::Par: {
        auto [f1, d1] = check(c->c);
        auto [f2, d2] = check(c->d);
        auto f = combine_flags(f1, f2);
        if (!f) throw TypeError(ErrorKind::MainMainClash, "T-Par: two main threads in parallel");
        DerivationP d;
        if (ck.deriv_) {
          d = std::make_shared<Derivation>();
          d->rule = "T-Par";
          d->judgement = std::string("|-") + flag_name(*f) + " " + to_string(c);
          if (d1) d->kids.push_back(d1);
          if (d2) d->kids.push_back(d2);
        }
        return {*f, d};
      }
      case ConfKind::Res: {
        TypeP s = c->ann ? c->ann : infer_restriction_type(c->x, c->y, c->c);
        if (!s->is_session())
          throw TypeError(ErrorKind::TypeMismatch, "restriction over non-session type " + to_string(s));
        ck.ingress(s, {});
        ck.add(c->x, s, {});
        ck.add(c->y, dual(s), {});
        auto [f, d1] = check(c->c);
        for (auto* n : {&c->x, &c->y})
          if (ck.avail.count(*n))
            throw TypeError(ErrorKind::NonLinearUse, "endpoint " + *n + " is never used");
        DerivationP d;
        if (ck.deriv_) {
          d = std::make_shared<Derivation>();
          d->rule = "T-Res";
          d->judgement = c->x + " : " + to_string(s) + ", " + c->y + " : " + to_string(dual(s)) + " |-" +
                         flag_name(f) + " " + to_string(c);
          if (d1) d->kids.push_back(d1);
        }
        return {f, d};
      }
    }
    throw TypeError(ErrorKind::TypeMismatch, "unknown configuration");
  }
};

}  // namespace

TypeP infer_restriction_type(const Name& x, const Name& y, const ConfP& body) {
  if (auto t = find_in_conf(x, body)) return t;
  if (auto t = find_in_conf(y, body)) {
    if (t->is_session()) return dual(t);
  }
  throw TypeError(ErrorKind::MissingAnnotation,
                  "cannot infer the session type of restriction (nu " + x + " " + y + "); annotate it");
}

ConfigTyping typecheck_config(const TypeEnv& env, const ConfP& c, bool want_derivation) {
  ConfChecker cc(want_derivation);
  for (auto& [x, t] : env.entries) {
    cc.ck.ingress(t, {});
    cc.ck.add(x, t, {});
  }
  auto [f, d] = cc.check(c);
  if (!cc.ck.avail.empty())
    throw TypeError(ErrorKind::NonLinearUse, "linear name " + cc.ck.avail.begin()->first + " is never used");
  return {f, d};
}

std::variant<ConfigTyping, TypeError> try_typecheck_config(const TypeEnv& env, const ConfP& c) {
  try {
    return typecheck_config(env, c);
  } catch (TypeError& e) {
    return e;
  }
}

}  // namespace pgv
