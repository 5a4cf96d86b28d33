use horizon_lab::geometry::{deformation_sup, timelike_scan, GeneratorField, RegionGrid, SpacetimeChart};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for a in [0.05, 0.1, 0.2, 0.4] {
        let chart = SpacetimeChart::kerr(1.0, a)?;
        let gen = GeneratorField::corotating(&chart)?;
        let exterior = RegionGrid::exterior(&chart, 40.0, 400, 31);
        let t = timelike_scan(&gen, &chart, &exterior)?;
        let blend = RegionGrid::uniform(5.0, 6.0, 101, 31, 0.05);
        let sup = deformation_sup(&gen, &chart, &blend)?;
        println!(
            "a = {a:<5} omega_H = {:.6}  min -g(T_chi,T_chi) = {:.3e} at r = {:.4}  sup |pi| on (5M,6M) = {sup:.4e}  sup/a = {:.4}",
            chart.horizon_angular_velocity(),
            t.min_margin,
            t.worst_point[1],
            sup / a
        );
    }
    Ok(())
}
