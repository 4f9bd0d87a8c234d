#include "pgv/parse.hpp"

namespace pgv {

namespace {
TypeP branch_type(const TypeP& choice, bool right) {
  if (!choice || choice->kind != TypeKind::Send || !choice->a || choice->a->kind != TypeKind::Sum)
    return nullptr;
  return right ? choice->a->b : choice->a->a;
}
}  // namespace

TermP elaborate(const TermP& t) {
  std::vector<TermP> kids;
  kids.reserve(t->kids.size());
  for (auto& k : t->kids) kids.push_back(elaborate(k));

  switch (t->kind) {
    case TermKind::Let: return tm::app(tm::lam(t->name, kids[1]), kids[0]);

    case TermKind::LamUnit: {
      Name z = fresh_name("z");
      return tm::lam(z, tm::seq(tm::var(z), kids[0]), ty::unit());
    }

    case TermKind::LamPair: {
      Name z = fresh_name("z");
      return tm::lam(z, tm::let_pair(t->name, t->name2, tm::var(z), kids[0]), t->ann);
    }

    case TermKind::Fork: {
      Name x = fresh_name("x"), y = fresh_name("y"), z = fresh_name("z"), u = fresh_name("z");
      TermP child = tm::lam(u, tm::seq(tm::var(u), tm::app(tm::var(x), tm::var(y))), ty::unit());
      TermP body = tm::let_pair(
          y, z, tm::app(tm::cnst(Const::New, t->ann), tm::unit()),
          tm::seq(tm::app(Const::Spawn, child), tm::var(z)));
      return tm::app(tm::lam(x, body), kids[0]);
    }

    case TermKind::Select: {
      Name x = fresh_name("x"), y = fresh_name("y"), z = fresh_name("z");
      TypeP mine = branch_type(t->ann, t->right);
      TypeP sum = t->ann && t->ann->kind == TypeKind::Send ? t->ann->a : nullptr;
      TermP injected = t->right ? tm::inr(tm::var(y), sum) : tm::inl(tm::var(y), sum);
      TermP body = tm::let_pair(
          y, z, tm::app(tm::cnst(Const::New, mine), tm::unit()),
          tm::seq(tm::app(Const::Close, tm::app(Const::Send, tm::pair(injected, tm::var(x)))),
                  tm::var(z)));
      return tm::app(tm::lam(x, body, t->ann), kids[0]);
    }

    case TermKind::Offer: {
      Name z = fresh_name("z"), w = fresh_name("w");
      return tm::let_pair(
          z, w, tm::app(Const::Recv, kids[0]),
          tm::seq(tm::app(Const::Wait, tm::var(w)),
                  tm::case_(tm::var(z), t->name, kids[1], t->name2, kids[2])));
    }

    case TermKind::OfferEmpty: {
      Name z = fresh_name("z"), w = fresh_name("w");
      return tm::let_pair(z, w, tm::app(Const::Recv, kids[0]),
                          tm::seq(tm::app(Const::Wait, tm::var(w)), tm::absurd(tm::var(z), t->ann)));
    }

    default: {
      bool same = true;
      for (std::size_t i = 0; i < kids.size(); ++i) same &= kids[i] == t->kids[i];
      return same ? t : tm::with_kids(t, std::move(kids));
    }
  }
}

ConfP elaborate(const ConfP& c) {
  switch (c->kind) {
    case ConfKind::Thread: return cf::thread(c->flag, elaborate(c->term), c->id);
    case ConfKind::Par: return cf::par(elaborate(c->c), elaborate(c->d));
    case ConfKind::Res: return cf::res(c->x, c->y, elaborate(c->c), c->ann);
  }
  return c;
}

}  // namespace pgv
