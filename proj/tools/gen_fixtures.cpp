// Writes the canonical derivation fixtures. Every file is verified, printed,
// re-parsed, and re-printed before it lands; generation is deterministic, so
// regenerating into a clean checkout is a no-op.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ttr/derivations.hpp"
#include "ttr/formula.hpp"
#include "ttr/subtyping.hpp"
#include "ttr/typing.hpp"

namespace fml = ttr::fml;
namespace sub = ttr::sub;
namespace typ = ttr::typ;
namespace der = ttr::der;

namespace {

int failures = 0;

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    ++failures;
    return;
  }
  std::cout << "wrote " << path.string() << " (" << text.size() << " bytes)\n";
}

void emit_typing(const std::filesystem::path& dir, const std::string& name,
                 const typ::TyPtr& d, const fml::Signature& sig) {
  try {
    typ::check_typing(d, {});
    typ::TyFile f{d->concl.system, sig, {}, d};
    std::string text = typ::print_ty_file(f);
    auto back = typ::parse_ty_file(text);
    if (typ::print_ty_file(back) != text) {
      std::cerr << name << ": reprint differs from the original\n";
      ++failures;
      return;
    }
    typ::check_typing(back.root, back.eqs);
    write_file(dir / (name + ".ty"), text);
  } catch (const std::exception& e) {
    std::cerr << name << ": " << e.what() << "\n";
    ++failures;
  }
}

void emit_inclusion(const std::filesystem::path& dir, const std::string& name,
                    const sub::SubPtr& d, const fml::Signature& sig,
                    sub::Mode mode) {
  try {
    sub::check_sub(d, {}, mode);
    sub::SubFile f{sig, {}, d};
    std::string text = sub::print_sub_file(f);
    auto back = sub::parse_sub_file(text);
    if (sub::print_sub_file(back) != text) {
      std::cerr << name << ": reprint differs from the original\n";
      ++failures;
      return;
    }
    sub::check_sub(back.root, back.eqs, mode);
    write_file(dir / (name + ".sub"), text);
  } catch (const std::exception& e) {
    std::cerr << name << ": " << e.what() << "\n";
    ++failures;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "cannot create " << dir << ": " << ec.message() << "\n";
    return 1;
  }

  const auto sig = der::numeral_signature();
  emit_typing(dir, "zero", der::zero_typing(typ::System::ttr), sig);
  emit_typing(dir, "succ", der::succ_typing(), sig);
  emit_typing(dir, "delta", der::delta_typing(), sig);
  emit_typing(dir, "g", der::g_typing(), sig);
  emit_typing(dir, "t1", der::t1_typing(), sig);
  emit_typing(dir, "t2", der::t2_typing(), sig);
  emit_typing(dir, "prop_nat", der::prop_nat_typing(typ::System::ttr_diamond), {});
  emit_typing(dir, "remark", der::remark_typing(), {});
  emit_inclusion(dir, "storage_chain", der::storage_chain().incl, sig,
                 sub::Mode::full);

  auto corpus = der::restricted_corpus();
  const char* corpus_names[] = {"poly_id",           "poly_k",
                                "zero_restricted",   "prop_nat_restricted",
                                "redex_identity",    "redex_reduct"};
  if (corpus.size() != std::size(corpus_names)) {
    std::cerr << "restricted corpus changed size; update the name table\n";
    return 1;
  }
  for (std::size_t i = 0; i < corpus.size(); ++i)
    emit_typing(dir, corpus_names[i], corpus[i], sig);

  if (failures) {
    std::cerr << failures << " fixture(s) failed\n";
    return 1;
  }
  return 0;
}
