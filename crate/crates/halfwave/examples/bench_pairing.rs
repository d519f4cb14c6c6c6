fn main() {
    let x = f64::from_bits(4607085973338287796u64);
    let s16 = format!("{:.16e}", x);
    let s17 = format!("{:.17e}", x);
    let back16: f64 = s16.parse().unwrap();
    println!("x bits     = {}", x.to_bits());
    println!("{{:.16e}}    = {s16} -> bits {}", back16.to_bits());
    println!("{{:.17e}}    = {s17}");
    println!("ryu-style  = {x}");
    let back_shortest: f64 = format!("{x}").parse().unwrap();
    println!("shortest round trip ok: {}", back_shortest.to_bits() == x.to_bits());
}
