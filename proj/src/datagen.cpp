#include "synoq/datagen.hpp"

#include <algorithm>
#include <numeric>

namespace synoq {

namespace {

AttrDomain int_domain(i64 lo, i64 hi, bool unique = false) {
  AttrDomain d;
  d.kind = AttrKind::IntegerRange;
  d.lo = lo;
  d.hi = hi;
  d.unique_valued = unique;
  return d;
}

AttrDomain cat_domain(std::vector<std::string> dict) {
  AttrDomain d;
  d.kind = AttrKind::Categorical;
  d.lo = 0;
  d.hi = static_cast<i64>(dict.size()) - 1;
  d.dict = std::move(dict);
  return d;
}

// Zipf-weighted sampler over ids 1..n (rank r gets weight r^-s).
struct ZipfIds {
  std::vector<double> cdf;

  ZipfIds(size_t n, double s) {
    cdf.resize(n);
    double acc = 0.0;
    for (size_t r = 0; r < n; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), s);
      cdf[r] = acc;
    }
    for (double& v : cdf) v /= acc;
  }

  i64 draw(Rng& rng) const {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double u = uni(rng);
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return static_cast<i64>(it - cdf.begin()) + 1;
  }
};

i64 uniform(Rng& rng, i64 lo, i64 hi) {
  return std::uniform_int_distribution<i64>(lo, hi)(rng);
}

i64 weighted(Rng& rng, const std::vector<int>& weights) {
  std::discrete_distribution<int> d(weights.begin(), weights.end());
  return d(rng);
}

// k distinct values from 1..n, in shuffled order.
std::vector<i64> sample_unique(Rng& rng, size_t k, size_t n) {
  std::vector<i64> ids(n);
  std::iota(ids.begin(), ids.end(), i64{1});
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(k);
  return ids;
}

}  // namespace

Database gen_data(u64 scale, u64 seed) {
  if (scale < 1) throw InvalidParameter("scale must be >= 1");
  Rng rng = seeded_rng(seed);

  const size_t n_account = 1200 * scale;
  const size_t n_client = 1500 * scale;
  const size_t n_disp = 1300 * scale;
  const size_t n_loan = 800 * scale;
  const size_t n_order = 1800 * scale;
  const size_t n_trans = 3400 * scale;

  const i64 max_account = static_cast<i64>(n_account);
  const i64 max_client = static_cast<i64>(n_client);

  Database db;

  {  // account(account_id, district_id, date)
    Relation rel;
    rel.schema.name = "account";
    rel.schema.columns = {
        {"account_id", int_domain(1, max_account, true)},
        {"district_id", int_domain(1, 77)},
        {"date", int_domain(0, 364)},
    };
    std::vector<i64> ids = sample_unique(rng, n_account, n_account);
    for (size_t r = 0; r < n_account; ++r) {
      rel.append_row({ids[r], uniform(rng, 1, 77), uniform(rng, 0, 364)});
    }
    db.tables.emplace("account", std::move(rel));
  }

  {  // client(client_id, district_id)
    Relation rel;
    rel.schema.name = "client";
    rel.schema.columns = {
        {"client_id", int_domain(1, max_client, true)},
        {"district_id", int_domain(1, 77)},
    };
    std::vector<i64> ids = sample_unique(rng, n_client, n_client);
    for (size_t r = 0; r < n_client; ++r) {
      rel.append_row({ids[r], uniform(rng, 1, 77)});
    }
    db.tables.emplace("client", std::move(rel));
  }

  const ZipfIds zipf(n_account, 0.8);

  {  // disp(client_id, account_id, type)
    Relation rel;
    rel.schema.name = "disp";
    rel.schema.columns = {
        {"client_id", int_domain(1, max_client, true)},
        {"account_id", int_domain(1, max_account)},
        {"type", cat_domain({"OWNER", "DISPONENT"})},
    };
    std::vector<i64> clients = sample_unique(rng, n_disp, n_client);
    static const std::vector<int> type_w = {3, 1};
    for (size_t r = 0; r < n_disp; ++r) {
      rel.append_row({clients[r], zipf.draw(rng), weighted(rng, type_w)});
    }
    db.tables.emplace("disp", std::move(rel));
  }

  {  // loan(account_id, duration, amount, date)
    Relation rel;
    rel.schema.name = "loan";
    rel.schema.columns = {
        {"account_id", int_domain(1, max_account, true)},
        {"duration", int_domain(12, 60)},
        {"amount", int_domain(1000, 500000)},
        {"date", int_domain(0, 364)},
    };
    std::vector<i64> accounts = sample_unique(rng, n_loan, n_account);
    static const i64 durations[] = {12, 24, 36, 48, 60};
    for (size_t r = 0; r < n_loan; ++r) {
      rel.append_row({accounts[r], durations[uniform(rng, 0, 4)],
                      uniform(rng, 1000, 500000), uniform(rng, 0, 364)});
    }
    db.tables.emplace("loan", std::move(rel));
  }

  {  // order(account_id, k_symbol, amount)
    Relation rel;
    rel.schema.name = "order";
    rel.schema.columns = {
        {"account_id", int_domain(1, max_account)},
        {"k_symbol", cat_domain({"POJISTNE", "SIPO", "UVER", "LEASING"})},
        {"amount", int_domain(1, 30000)},
    };
    static const std::vector<int> ks_w = {30, 30, 20, 20};
    for (size_t r = 0; r < n_order; ++r) {
      rel.append_row(
          {zipf.draw(rng), weighted(rng, ks_w), uniform(rng, 1, 30000)});
    }
    db.tables.emplace("order", std::move(rel));
  }

  {  // trans(account_id, operation, amount, date)
    Relation rel;
    rel.schema.name = "trans";
    rel.schema.columns = {
        {"account_id", int_domain(1, max_account)},
        {"operation",
         cat_domain({"VKLAD", "PREVOD Z UCTU", "VYBER", "PREVOD NA UCET",
                     "VYBER KARTOU"})},
        {"amount", int_domain(1, 100000)},
        {"date", int_domain(0, 364)},
    };
    static const std::vector<int> op_w = {25, 20, 25, 15, 15};
    for (size_t r = 0; r < n_trans; ++r) {
      rel.append_row({zipf.draw(rng), weighted(rng, op_w),
                      uniform(rng, 1, 100000), uniform(rng, 0, 364)});
    }
    db.tables.emplace("trans", std::move(rel));
  }

  return db;
}

}  // namespace synoq
