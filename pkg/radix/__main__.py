from .radix import main

main()
