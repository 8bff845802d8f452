//! Convergence-study driver.
//!
//! For each mesh size the matrices and the preconditioner factorization are
//! built once and shared by both right-hand-side variants.

use std::sync::{Arc, OnceLock};

use crate::analysis::{error_vs_exact, superclose_error, superconvergent_error, ConvergenceReport, ErrorTriple, Quantity};
use crate::error::{Error, Result};
use crate::interp::{global_ih, MacroField};
use crate::mesh::BrickMesh;
use crate::mms::ExactFields;
use crate::polyquad::{GaussRule, DEFAULT_QUAD_ORDER};
use crate::spaces::ReferenceSpaces;
use crate::system::{
    solve_saddle, Assembler, BasisTable, BlockPreconditioner, CsrMatrix, DofVector, GlobalDofMap, LocalMatrices,
    SaddleSolution, SaddleSystem, SolverParams,
};

pub use crate::system::Scheme;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudyConfig {
    pub quad_order: usize,
    pub solver: SolverParams,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            quad_order: DEFAULT_QUAD_ORDER,
            solver: SolverParams::default(),
        }
    }
}

/// Mesh-dependent, scheme-independent data.
pub struct Discretization {
    pub mesh: BrickMesh,
    pub dofmap: GlobalDofMap,
    pub a: Arc<CsrMatrix>,
    pub b: Arc<CsrMatrix>,
    pub precond: BlockPreconditioner,
}

pub struct SchemeRun {
    pub scheme: Scheme,
    pub system: SaddleSystem,
    pub solution: SaddleSolution,
}

pub struct Study {
    pub config: StudyConfig,
    pub spaces: ReferenceSpaces,
    pub locals: LocalMatrices,
    pub exact: ExactFields,
    rule: GaussRule,
    vk_table: BasisTable,
    nedelec_table: BasisTable,
    vm_table: OnceLock<BasisTable>,
}

impl Study {
    pub fn new(config: StudyConfig) -> Result<Self> {
        let rule = GaussRule::new(config.quad_order)?;
        let spaces = ReferenceSpaces::build()?;
        let locals = LocalMatrices::new(&spaces);
        let vk_table = BasisTable::on_cell(&spaces.vk.dual, config.quad_order)?;
        let nedelec_table = BasisTable::on_cell(&spaces.nedelec.dual, config.quad_order)?;
        Ok(Study {
            config,
            spaces,
            locals,
            exact: ExactFields::new(),
            rule,
            vk_table,
            nedelec_table,
            vm_table: OnceLock::new(),
        })
    }

    pub fn vk_table(&self) -> &BasisTable {
        &self.vk_table
    }

    pub fn vm_table(&self) -> &BasisTable {
        self.vm_table.get_or_init(|| {
            BasisTable::on_macro(&self.spaces.vm.dual, self.config.quad_order).expect("order validated in Study::new")
        })
    }

    pub fn rule(&self) -> &GaussRule {
        &self.rule
    }

    pub fn discretize(&self, n: usize) -> Result<Discretization> {
        let mesh = BrickMesh::new(n)?;
        let dofmap = GlobalDofMap::new(&mesh);
        let asm = Assembler::new(&mesh, &dofmap, &self.locals);
        let a = Arc::new(asm.assemble_a());
        let b = Arc::new(asm.assemble_b());
        let precond = BlockPreconditioner::new(&asm.assemble_norm_v(), &asm.assemble_q_stiffness())?;
        Ok(Discretization {
            mesh,
            dofmap,
            a,
            b,
            precond,
        })
    }

    pub fn system(&self, disc: &Discretization, scheme: Scheme) -> SaddleSystem {
        let asm = Assembler::new(&disc.mesh, &disc.dofmap, &self.locals);
        let exact = &self.exact;
        let rhs_v = asm.assemble_rhs(|x| exact.f(x), scheme, &self.vk_table, &self.nedelec_table);
        SaddleSystem {
            a: Arc::clone(&disc.a),
            b: Arc::clone(&disc.b),
            rhs_v,
        }
    }

    pub fn solve(&self, disc: &Discretization, scheme: Scheme) -> Result<SchemeRun> {
        let system = self.system(disc, scheme);
        let solution = solve_saddle(&system, &disc.precond, &self.config.solver)?;
        Ok(SchemeRun {
            scheme,
            system,
            solution,
        })
    }

    pub fn errors(&self, disc: &Discretization, run: &SchemeRun) -> ErrorTriple {
        error_vs_exact(&run.solution.u, &self.exact, &disc.mesh, &disc.dofmap, &self.vk_table)
    }

    /// Corrected interpolant `I_h u` of the exact solution.
    pub fn interpolant(&self, disc: &Discretization) -> DofVector {
        global_ih(&self.exact, &disc.mesh, &disc.dofmap, &self.rule, true)
    }

    pub fn superclose(&self, disc: &Discretization, run: &SchemeRun) -> ErrorTriple {
        let ih = self.interpolant(disc);
        superclose_error(&ih, &run.solution.u, &disc.mesh, &disc.dofmap, &self.locals)
    }

    pub fn superconvergent(&self, disc: &Discretization, run: &SchemeRun) -> Result<ErrorTriple> {
        let partition = disc.mesh.macro_partition()?;
        let field = MacroField::from_discrete(&run.solution.u, &disc.dofmap, &partition);
        Ok(superconvergent_error(&field, &self.exact, self.vm_table()))
    }

    /// Runs every `(scheme, quantity)` pair over the mesh sizes `ns`, in
    /// order. `progress` receives one line per completed stage.
    pub fn run(
        &self,
        ns: &[usize],
        schemes: &[Scheme],
        quantities: &[Quantity],
        mut progress: impl FnMut(&str),
    ) -> Result<Vec<ConvergenceReport>> {
        if quantities.contains(&Quantity::Superconvergent) {
            if let Some(&n) = ns.iter().find(|&&n| !n.is_multiple_of(3)) {
                return Err(Error::NonDivisibleMesh { n });
            }
        }
        let mut reports: Vec<ConvergenceReport> = schemes
            .iter()
            .flat_map(|&s| quantities.iter().map(move |&q| ConvergenceReport::new(s, q)))
            .collect();
        for &n in ns {
            let t0 = std::time::Instant::now();
            let disc = self.discretize(n)?;
            progress(&format!(
                "n={n}: {} velocity + {} pressure unknowns, assembled and factorized in {:.1}s",
                disc.dofmap.num_v(),
                disc.dofmap.num_q(),
                t0.elapsed().as_secs_f64()
            ));
            for &scheme in schemes {
                let t1 = std::time::Instant::now();
                let run = self.solve(&disc, scheme)?;
                progress(&format!(
                    "n={n} {scheme}: {} iterations, relative residual {:.2e}, {:.1}s",
                    run.solution.iterations,
                    run.solution.residual,
                    t1.elapsed().as_secs_f64()
                ));
                for &quantity in quantities {
                    let e = match quantity {
                        Quantity::Error => self.errors(&disc, &run),
                        Quantity::Superclose => self.superclose(&disc, &run),
                        Quantity::Superconvergent => self.superconvergent(&disc, &run)?,
                    };
                    progress(&format!(
                        "n={n} {scheme} {quantity}: {:.4e} {:.4e} {:.4e}",
                        e.grad_curl, e.curl, e.l2
                    ));
                    let report = reports
                        .iter_mut()
                        .find(|r| r.scheme == scheme && r.quantity == quantity)
                        .expect("report created for every pair");
                    report.rows.push((n, e));
                }
            }
        }
        Ok(reports)
    }
}
