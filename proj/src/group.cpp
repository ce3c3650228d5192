#include "rcv/group.hpp"

#include <array>
#include <sstream>

#include "rcv/error.hpp"

namespace rcv {

namespace {

constexpr int kMillerRabinReps = 40;  // error <= 4^-40 = 2^-80

constexpr std::array<unsigned, 53> kSmallPrimes = {
    3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,  59,  61,  67,
    71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157,
    163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251};

bool probably_prime(const mpz_class& n) { return mpz_probab_prime_p(n.get_mpz_t(), kMillerRabinReps) != 0; }

mpz_class parse_dec(std::string_view s) {
  mpz_class v;
  if (s.empty() || v.set_str(std::string(s), 10) != 0) throw FormatError("bad decimal integer: " + std::string(s));
  return v;
}

constexpr const char* kRfc3526_2048 =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
    "15728E5A8AACAA68FFFFFFFFFFFFFFFF";

constexpr const char* kRfc3526_3072 =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
    "15728E5A8AAAC42DAD33170D04507A33A85521ABDF1CBA64ECFB850458DBEF0A8AEA71575D060C7DB3970F85A6E1E4C7"
    "ABF5AE8CDB0933D71E8C94E04A25619DCEE3D2261AD2EE6BF12FFA06D98A0864D87602733EC86A64521F2B18177B200C"
    "BBE117577A615D6C770988C0BAD946E208E24FA074E5AB3143DB5BFCE0FD108E4B82D120A93AD2CAFFFFFFFFFFFFFFFF";

ParamsPtr from_safe_prime_hex(const char* hex) {
  mpz_class p(hex, 16);
  mpz_class q = (p - 1) / 2;
  return make_params(p, q, 4);
}

}  // namespace

std::string GroupParams::to_text() const {
  return "p=" + p.get_str() + ";q=" + q.get_str() + ";g=" + g.get_str();
}

bool is_member(const GroupParams& params, const mpz_class& x) {
  if (x < 1 || x >= params.p) return false;
  return mpz_jacobi(x.get_mpz_t(), params.p.get_mpz_t()) == 1;
}

ParamsPtr make_params(const mpz_class& p, const mpz_class& q, const mpz_class& g) {
  if (p != 2 * q + 1) throw InvalidArgument("p != 2q+1");
  if (q < 2 || !probably_prime(q)) throw InvalidArgument("q is not prime");
  if (!probably_prime(p)) throw InvalidArgument("p is not prime");
  auto params = std::make_shared<GroupParams>(GroupParams{p, q, g});
  if (g <= 1 || g >= p || !is_member(*params, g)) throw InvalidArgument("g is not a non-trivial quadratic residue");
  mpz_class check;
  mpz_powm(check.get_mpz_t(), g.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  if (check != 1) throw InvalidArgument("g^q != 1");
  return params;
}

ParamsPtr params_from_text(std::string_view text) {
  mpz_class vals[3];
  const char* names[3] = {"p=", "q=", "g="};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    if (text.substr(pos, 2) != names[i]) throw FormatError("bad group params text");
    pos += 2;
    std::size_t end = text.find(';', pos);
    if (i == 2) {
      if (end != std::string_view::npos) throw FormatError("trailing data after group params");
      end = text.size();
    } else if (end == std::string_view::npos) {
      throw FormatError("bad group params text");
    }
    vals[i] = parse_dec(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return make_params(vals[0], vals[1], vals[2]);
}

ParamsPtr generate_params(unsigned bits, std::string_view seed, unsigned long budget) {
  if (bits < 16) throw InvalidArgument("group size must be at least 16 bits");
  Rng rng(std::string("params/") + std::to_string(bits) + "/" + std::string(seed));
  // q has bits-1 bits so that p = 2q+1 has exactly `bits` bits.
  const mpz_class top = mpz_class(1) << (bits - 2);
  for (unsigned long attempt = 0; attempt < budget; ++attempt) {
    mpz_class q = rng.below(top) + top;
    q |= 1;
    const mpz_class p = 2 * q + 1;
    bool sieved = false;
    for (unsigned sp : kSmallPrimes) {
      if (q == sp || p == sp) continue;
      if (mpz_divisible_ui_p(q.get_mpz_t(), sp) || mpz_divisible_ui_p(p.get_mpz_t(), sp)) {
        sieved = true;
        break;
      }
    }
    if (sieved) continue;
    if (!probably_prime(q) || !probably_prime(p)) continue;
    return make_params(p, q, 4);
  }
  throw Error("no safe prime found within the iteration budget");
}

ParamsPtr standard_group_2048() {
  static const ParamsPtr params = from_safe_prime_hex(kRfc3526_2048);
  return params;
}

ParamsPtr standard_group_3072() {
  static const ParamsPtr params = from_safe_prime_hex(kRfc3526_3072);
  return params;
}

// ---- GroupElement -----------------------------------------------------------

GroupElement GroupElement::from_integer(ParamsPtr params, const mpz_class& x) {
  if (!is_member(*params, x)) throw InvalidArgument("value " + x.get_str() + " is not a member of G");
  return GroupElement(std::move(params), x);
}

GroupElement GroupElement::identity(ParamsPtr params) { return GroupElement(std::move(params), 1); }

GroupElement GroupElement::generator(ParamsPtr params) {
  mpz_class g = params->g;
  return GroupElement(std::move(params), std::move(g));
}

void GroupElement::check_same(const GroupElement& rhs) const {
  if (params_ != rhs.params_ && !params_->same_group(*rhs.params_))
    throw InvalidArgument("group elements from different parameter sets");
}

GroupElement GroupElement::operator*(const GroupElement& rhs) const {
  check_same(rhs);
  mpz_class r = value_ * rhs.value_;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), params_->p.get_mpz_t());
  return GroupElement(params_, std::move(r));
}

GroupElement& GroupElement::operator*=(const GroupElement& rhs) {
  check_same(rhs);
  value_ *= rhs.value_;
  mpz_mod(value_.get_mpz_t(), value_.get_mpz_t(), params_->p.get_mpz_t());
  return *this;
}

GroupElement GroupElement::operator/(const GroupElement& rhs) const { return *this * rhs.inv(); }

GroupElement GroupElement::inv() const {
  mpz_class r;
  mpz_invert(r.get_mpz_t(), value_.get_mpz_t(), params_->p.get_mpz_t());
  return GroupElement(params_, std::move(r));
}

GroupElement GroupElement::pow(const Scalar& x) const {
  if (params_ != x.params() && !params_->same_group(*x.params()))
    throw InvalidArgument("scalar from a different parameter set");
  mpz_class r;
  mpz_powm(r.get_mpz_t(), value_.get_mpz_t(), x.value().get_mpz_t(), params_->p.get_mpz_t());
  return GroupElement(params_, std::move(r));
}

GroupElement GroupElement::pow(const mpz_class& x) const {
  mpz_class e;
  mpz_mod(e.get_mpz_t(), x.get_mpz_t(), params_->q.get_mpz_t());
  mpz_class r;
  mpz_powm(r.get_mpz_t(), value_.get_mpz_t(), e.get_mpz_t(), params_->p.get_mpz_t());
  return GroupElement(params_, std::move(r));
}

// ---- Scalar -----------------------------------------------------------------

Scalar::Scalar(ParamsPtr params, const mpz_class& value) : params_(std::move(params)) {
  mpz_mod(value_.get_mpz_t(), value.get_mpz_t(), params_->q.get_mpz_t());
}

Scalar Scalar::random(ParamsPtr params, Rng& rng) {
  mpz_class v = rng.below(params->q);
  return Scalar(std::move(params), v);
}

Scalar Scalar::random_nonzero(ParamsPtr params, Rng& rng) {
  mpz_class v = rng.below(params->q - 1) + 1;
  return Scalar(std::move(params), v);
}

void Scalar::check_same(const Scalar& rhs) const {
  if (params_ != rhs.params_ && !params_->same_group(*rhs.params_))
    throw InvalidArgument("scalars from different parameter sets");
}

Scalar Scalar::operator+(const Scalar& rhs) const {
  check_same(rhs);
  return Scalar(params_, value_ + rhs.value_);
}

Scalar& Scalar::operator+=(const Scalar& rhs) {
  check_same(rhs);
  value_ += rhs.value_;
  if (value_ >= params_->q) value_ -= params_->q;
  return *this;
}

Scalar Scalar::operator-(const Scalar& rhs) const {
  check_same(rhs);
  return Scalar(params_, value_ - rhs.value_);
}

Scalar Scalar::operator*(const Scalar& rhs) const {
  check_same(rhs);
  return Scalar(params_, value_ * rhs.value_);
}

Scalar Scalar::operator-() const { return Scalar(params_, -value_); }

Scalar Scalar::inverse() const {
  if (value_ == 0) throw InvalidArgument("zero has no inverse mod q");
  mpz_class r;
  mpz_invert(r.get_mpz_t(), value_.get_mpz_t(), params_->q.get_mpz_t());
  return Scalar(params_, r);
}

}  // namespace rcv
