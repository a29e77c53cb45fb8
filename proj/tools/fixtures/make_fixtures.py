"""Regenerate the bundled FCIDUMP fixtures and their reference energies.

Requires pyscf. Run from the repository root:

    python tools/fixtures/make_fixtures.py data/fixtures
"""
import json
import sys
from pathlib import Path

from pyscf import ao2mo, fci, gto, mcscf, scf
from pyscf.tools import fcidump

# Geometries in Angstrom. Water uses the PubChem 3D conformer.
MOLECULES = {
    "h2": "H 0 0 0; H 0 0 0.7414",
    "lih": "Li 0 0 0; H 0 0 1.5949",
    "h2o": "O 0 0 0; H 0.2774 0.8929 0.2544; H 0.6068 -0.2383 -0.7169",
    "n2": "N 0 0 0; N 0 0 1.0977",
}

# (molecule, active orbitals, active electrons)
ACTIVE_SPACES = {
    "lih_cas3": ("lih", 3, 2),
    "h2o_cas5": ("h2o", 5, 6),
}


def full_space(name, atom, outdir, refs):
    mol = gto.M(atom=atom, basis="sto-3g", verbose=0)
    mf = scf.RHF(mol).run()
    e_fci, _ = fci.FCI(mf).kernel()
    fcidump.from_scf(mf, str(outdir / f"{name}.fcidump"), tol=1e-14)
    refs[name] = {
        "n_orbitals": int(mol.nao),
        "n_electrons": int(mol.nelectron),
        "ms2": int(mol.spin),
        "hf_energy": float(mf.e_tot),
        "fci_energy": float(e_fci),
    }


def active_space(name, parent, ncas, nelecas, outdir, refs):
    mol = gto.M(atom=MOLECULES[parent], basis="sto-3g", verbose=0)
    mf = scf.RHF(mol).run()
    cas = mcscf.CASCI(mf, ncas, nelecas)
    h1, ecore = cas.get_h1eff()
    h2 = ao2mo.restore(1, cas.get_h2eff(), ncas)
    fcidump.from_integrals(str(outdir / f"{name}.fcidump"), h1, h2, ncas,
                           nelecas, nuc=ecore, ms=0, tol=1e-14)
    e_cas = cas.kernel()[0]
    refs[name] = {
        "n_orbitals": ncas,
        "n_electrons": nelecas,
        "ms2": 0,
        "fci_energy": float(e_cas),
    }


def main():
    outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "data/fixtures")
    outdir.mkdir(parents=True, exist_ok=True)
    refs = {}
    for name, atom in MOLECULES.items():
        full_space(name, atom, outdir, refs)
    for name, (parent, ncas, nelecas) in ACTIVE_SPACES.items():
        active_space(name, parent, ncas, nelecas, outdir, refs)
    (outdir / "reference.json").write_text(json.dumps(refs, indent=2) + "\n")


if __name__ == "__main__":
    main()
