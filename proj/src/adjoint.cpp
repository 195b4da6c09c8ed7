#include "snf/adjoint.hpp"

#include <json.hpp>

#include "snf/errors.hpp"
#include "snf/lifting.hpp"

namespace snf {

namespace {

using nlohmann::json;

Int parse_int_str(const json& v, const char* what) {
    if (!v.is_string()) throw parse_error(std::string(what) + ": expected a decimal string");
    try {
        return Int(v.get<std::string>());
    } catch (const std::invalid_argument&) {
        throw parse_error(std::string(what) + ": invalid integer literal");
    }
}

} // namespace

OuterProductAdjoint outer_product_adjoint(const IntMat& a, const SmithMultipliers& t) {
    const int n = a.rows();
    if (a.cols() != n || t.S.n() != n || t.V.rows() != n || t.V.cols() != n || t.U.rows() != n ||
        t.U.cols() != n)
        throw dimension_error("outer_product_adjoint: shape mismatch");
    if (!t.S.valid_chain()) throw precondition_error("outer_product_adjoint: invalid Smith diagonal");

    MatBuf us(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) us.at(i, j) = t.U.at(i, j) * t.S.s(j);
    if (matmul(a, t.V) != us.freeze())
        throw precondition_error("outer_product_adjoint: triple does not satisfy A V = U S");

    const IntMat uinv = inverse_unimodular(t.U); // throws if U is not unimodular
    OuterProductAdjoint opa;
    opa.S = t.S;
    opa.Vbar = colmod(t.V, t.S);
    opa.Ubar = rowmod(uinv, t.S);
    return opa;
}

IntVec frac_solve(const OuterProductAdjoint& opa, const IntVec& b) {
    const int n = opa.n();
    if (static_cast<int>(b.size()) != n) throw dimension_error("frac_solve: vector length mismatch");
    const Int& s = opa.s();
    IntVec acc(n, Int(0));
    for (int j = 0; j < n; ++j) {
        const Int& sj = opa.S.s(j);
        if (sj == 1) continue;
        Int dot = 0;
        for (int i = 0; i < n; ++i) dot += opa.Ubar.at(j, i) * b[i];
        const Int y = rem(dot, sj) * (s / sj);
        if (y == 0) continue;
        for (int i = 0; i < n; ++i) acc[i] += opa.Vbar.at(i, j) * y;
    }
    for (int i = 0; i < n; ++i) acc[i] = rem(acc[i], s);
    return acc;
}

IntMat frac_inverse(const OuterProductAdjoint& opa) {
    const int n = opa.n();
    const Int& s = opa.s();
    MatBuf acc(n, n);
    for (int j = 0; j < n; ++j) {
        const Int& sj = opa.S.s(j);
        if (sj == 1) continue;
        const Int coef = s / sj;
        for (int i = 0; i < n; ++i) {
            if (opa.Vbar.at(i, j) == 0) continue;
            const Int left = opa.Vbar.at(i, j) * coef;
            for (int k = 0; k < n; ++k) acc.at(i, k) += left * opa.Ubar.at(j, k);
        }
    }
    return mat_mod(acc.freeze(), s);
}

std::string opa_to_json(const OuterProductAdjoint& opa) {
    const int n = opa.n();
    json j;
    j["n"] = n;
    j["s"] = opa.s().get_str();
    json diag = json::array();
    for (int i = 0; i < n; ++i) diag.push_back(opa.S.s(i).get_str());
    j["diag"] = std::move(diag);

    json vbar = json::array();
    for (int c = 0; c < n; ++c) {
        if (opa.S.s(c) == 1) continue;
        json col = json::array();
        for (int i = 0; i < n; ++i) col.push_back(opa.Vbar.at(i, c).get_str());
        vbar.push_back(json{{"j", c + 1}, {"col", std::move(col)}});
    }
    j["vbar"] = std::move(vbar);

    json ubar = json::array();
    for (int r = 0; r < n; ++r) {
        if (opa.S.s(r) == 1) continue;
        json row = json::array();
        for (int k = 0; k < n; ++k) row.push_back(opa.Ubar.at(r, k).get_str());
        ubar.push_back(json{{"i", r + 1}, {"row", std::move(row)}});
    }
    j["ubar"] = std::move(ubar);
    return j.dump(2);
}

OuterProductAdjoint opa_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("opa_from_json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("s") || !j.contains("diag") ||
        !j.contains("vbar") || !j.contains("ubar"))
        throw parse_error("opa_from_json: missing required field");
    if (!j["n"].is_number_integer()) throw parse_error("opa_from_json: n must be an integer");
    const int n = j["n"].get<int>();
    if (n < 1 || n > 1000000) throw parse_error("opa_from_json: n out of range");
    if (!j["diag"].is_array() || static_cast<int>(j["diag"].size()) != n)
        throw parse_error("opa_from_json: diag must have n entries");

    OuterProductAdjoint opa;
    opa.S.diag.resize(n);
    for (int i = 0; i < n; ++i) opa.S.diag[i] = parse_int_str(j["diag"][i], "diag");
    if (!opa.S.valid_chain()) throw parse_error("opa_from_json: diag is not a divisibility chain");
    if (parse_int_str(j["s"], "s") != opa.S.diag.back())
        throw parse_error("opa_from_json: s does not match the last diagonal entry");

    MatBuf vb(n, n), ub(n, n);
    std::vector<char> seen_col(n, 0), seen_row(n, 0);
    if (!j["vbar"].is_array() || !j["ubar"].is_array())
        throw parse_error("opa_from_json: vbar/ubar must be arrays");
    for (const json& item : j["vbar"]) {
        if (!item.is_object() || !item.contains("j") || !item.contains("col") ||
            !item["j"].is_number_integer())
            throw parse_error("opa_from_json: malformed vbar entry");
        const int c = item["j"].get<int>() - 1;
        if (c < 0 || c >= n || opa.S.s(c) == 1 || seen_col[c])
            throw parse_error("opa_from_json: bad vbar column index");
        seen_col[c] = 1;
        if (!item["col"].is_array() || static_cast<int>(item["col"].size()) != n)
            throw parse_error("opa_from_json: vbar column must have n entries");
        for (int i = 0; i < n; ++i) {
            Int v = parse_int_str(item["col"][i], "vbar");
            if (v < 0 || v >= opa.S.s(c)) throw parse_error("opa_from_json: vbar entry out of range");
            vb.at(i, c) = std::move(v);
        }
    }
    for (const json& item : j["ubar"]) {
        if (!item.is_object() || !item.contains("i") || !item.contains("row") ||
            !item["i"].is_number_integer())
            throw parse_error("opa_from_json: malformed ubar entry");
        const int r = item["i"].get<int>() - 1;
        if (r < 0 || r >= n || opa.S.s(r) == 1 || seen_row[r])
            throw parse_error("opa_from_json: bad ubar row index");
        seen_row[r] = 1;
        if (!item["row"].is_array() || static_cast<int>(item["row"].size()) != n)
            throw parse_error("opa_from_json: ubar row must have n entries");
        for (int k = 0; k < n; ++k) {
            Int v = parse_int_str(item["row"][k], "ubar");
            if (v < 0 || v >= opa.S.s(r)) throw parse_error("opa_from_json: ubar entry out of range");
            ub.at(r, k) = std::move(v);
        }
    }
    for (int c = 0; c < n; ++c)
        if (opa.S.s(c) != 1 && (!seen_col[c] || !seen_row[c]))
            throw parse_error("opa_from_json: missing column/row for a nontrivial invariant factor");
    opa.Vbar = vb.freeze();
    opa.Ubar = ub.freeze();
    return opa;
}

} // namespace snf
