fn main() {
    println!("ws");
}
