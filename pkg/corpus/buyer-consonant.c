tau;Request!Seller ; (Offer + Cancel) ; tau;Payment!Bank ; Receipt
