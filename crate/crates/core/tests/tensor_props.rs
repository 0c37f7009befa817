use std::sync::Arc;

use einform::tensor::permute_to_layout;
use einform::{DenseTensor, LayoutSpec};
use proptest::prelude::*;

fn layout_and_shape() -> impl Strategy<Value = (String, String, Vec<usize>)> {
    (2usize..=5)
        .prop_flat_map(|n| {
            let letters: Vec<char> = "cqgvd".chars().take(n).collect();
            (
                Just(letters.clone()).prop_shuffle(),
                Just(letters).prop_shuffle(),
                proptest::collection::vec(1usize..=4, n),
            )
        })
        .prop_map(|(a, b, shape)| (a.into_iter().collect(), b.into_iter().collect(), shape))
}

proptest! {
    #[test]
    fn permutation_round_trip((a, b, shape) in layout_and_shape()) {
        let la = LayoutSpec::new(&a).unwrap();
        let lb = LayoutSpec::new(&b).unwrap();
        let t = DenseTensor::from_fn(&shape, |i| i.iter().fold(0.0, |acc, &x| acc * 7.0 + x as f64));
        let there = permute_to_layout(&t, &la, &lb).unwrap();
        prop_assert!(there.is_contiguous());
        let back = permute_to_layout(&there, &lb, &la).unwrap();
        prop_assert_eq!(back.shape(), t.shape());
        prop_assert_eq!(back.to_vec(), t.to_vec());
    }

    #[test]
    fn merge_keeps_size_and_buffer(shape in proptest::collection::vec(1usize..=4, 1..=5), cut in 0usize..5) {
        let t = DenseTensor::from_fn(&shape, |i| i.iter().sum::<usize>() as f64);
        let cut = cut.min(shape.len() - 1);
        let groups = if cut == 0 {
            vec![(0..shape.len()).collect::<Vec<_>>()]
        } else {
            vec![(0..cut).collect(), (cut..shape.len()).collect()]
        };
        let m = t.merge_axes(&groups).unwrap();
        prop_assert_eq!(m.len(), t.len());
        prop_assert!(Arc::ptr_eq(m.buffer(), t.buffer()));
        prop_assert_eq!(m.to_vec(), t.to_vec());
    }
}

#[test]
fn strided_indexing() {
    let row = DenseTensor::from_vec(&[2, 3], (0..6).map(f64::from).collect()).unwrap();
    assert_eq!(row.item_offset(&[1, 2]).unwrap(), 5);
    let col = DenseTensor::from_strided(&[2, 3], &[1, 2], 0, Arc::new((0..6).map(f64::from).collect())).unwrap();
    assert_eq!(col.item_offset(&[1, 2]).unwrap(), 5);
    let v = DenseTensor::from_vec(&[4], vec![1.0; 4]).unwrap();
    assert_eq!(v.item_offset(&[0]).unwrap(), 0);
}

#[test]
fn identity_layout_keeps_data() {
    let t = DenseTensor::from_fn(&[3, 4], |i| (i[0] * 4 + i[1]) as f64);
    let l = LayoutSpec::new("cq").unwrap();
    let p = permute_to_layout(&t, &l, &l).unwrap();
    assert_eq!(p.to_vec(), t.to_vec());
}

#[test]
fn merge_row_major_order() {
    let t = DenseTensor::from_fn(&[2, 3], |i| (i[0] * 3 + i[1]) as f64);
    let m = t.merge_axes(&[vec![0, 1]]).unwrap();
    assert_eq!(m.shape(), &[6]);
    assert_eq!(m.to_vec(), vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    assert_eq!(t.merge_axes(&[vec![0], vec![1]]).unwrap().shape(), &[2, 3]);
}
