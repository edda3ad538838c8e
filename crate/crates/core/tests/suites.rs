use macflow::mesh::AxisPartition;
use macflow::verification::{check_dualities, check_inequalities};
use macflow::MacMesh;

fn stretched16() -> MacMesh {
    MacMesh::build(vec![
        AxisPartition::stretched(0.0, 1.0, 16, 3.0).unwrap(),
        AxisPartition::stretched(0.0, 1.0, 16, 3.0).unwrap(),
    ])
    .unwrap()
}

#[test]
fn identities_uniform_8x8() {
    let mesh = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[8, 8]).unwrap();
    let rep = check_dualities(&mesh, 100, 11);
    println!("{rep}");
    assert!(rep.passed());
}

#[test]
fn identities_stretched_16x16() {
    let rep = check_dualities(&stretched16(), 100, 12);
    println!("{rep}");
    assert!(rep.passed());
}

#[test]
fn inequalities_uniform_and_stretched() {
    let mesh = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[8, 8]).unwrap();
    for m in [mesh, stretched16()] {
        let rep = check_inequalities(&m, 1000, 5);
        println!("{rep}");
        assert!(rep.passed());
    }
}

#[test]
fn identities_in_three_dimensions() {
    let mesh = MacMesh::build(vec![
        AxisPartition::new(vec![0.0, 0.3, 0.5, 1.0]).unwrap(),
        AxisPartition::stretched(0.0, 1.0, 4, 2.0).unwrap(),
        AxisPartition::uniform(0.0, 0.5, 3).unwrap(),
    ])
    .unwrap();
    let rep = check_dualities(&mesh, 10, 2);
    println!("{rep}");
    assert!(rep.passed());
    let rep = check_inequalities(&mesh, 50, 2);
    println!("{rep}");
    assert!(rep.passed());
}
